//! Acceptance suite: one line per criterion with its runtime. Exits nonzero
//! if any criterion fails or overruns its time limit.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use flatlab::cli::{FactorRecord, HMinRecord, LatticeScan};
use flatlab::experiment::{survey_from_reports, track_experiment, SurveyRow, TrackRecord};
use flatlab::format::{parse_surface_text, print_surface};
use flatlab::parallel;
use flatlab::report::{from_csv, from_json, to_csv, to_json, SurfaceDoc, SurfaceSummary, Table};
use flatlab_core::audit::{h_minimal_analysis, h_minimal_from_moduli, period_is_valid, DirectionReport, Verdict};
use flatlab_core::builders;
use flatlab_core::cylinder::{decompose, shear_cylinders, CylinderDecomposition};
use flatlab_core::exact::ExactReal;
use flatlab_core::geom::V2;
use flatlab_core::saddle::{saddle_connections, saddle_connections_in, SaddleConnection, SearchLimits};
use flatlab_core::sl2::{bruhat, cartan, iwasawa, word_matrix, DecompositionKind, Mat2};
use flatlab_core::surface::TranslationSurface;
use flatlab_core::triangulation::{delaunay, equivalent};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;

type Outcome = Result<String, String>;

fn q(s: &str) -> ExactReal {
    s.parse().unwrap()
}

fn lim() -> SearchLimits {
    SearchLimits::default()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all_builders() -> Vec<(&'static str, TranslationSurface)> {
    vec![
        ("torus", builders::torus()),
        ("octagon", builders::octagon()),
        ("golden-l", builders::golden_l()),
        ("l3", builders::three_square_l()),
        ("stretched-l", builders::stretched_l()),
        ("perturbed-l:1/3:2/7", builders::from_expr("perturbed-l:1/3:2/7").unwrap()),
        ("origami:(1,2,3):(1,3)", builders::from_expr("origami:(1,2,3):(1,3)").unwrap()),
    ]
}

fn gauss_bonnet() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut surfaces = all_builders();
    let mut random = 0;
    while random < 50 {
        let n = rng.gen_range(1..=9);
        let mut h: Vec<usize> = (0..n).collect();
        let mut v = h.clone();
        h.shuffle(&mut rng);
        v.shuffle(&mut rng);
        if let Ok(m) = builders::origami(&h, &v) {
            surfaces.push(("random origami", m));
            random += 1;
        }
    }
    for (name, m) in &surfaces {
        let orders: i64 = m.cone_points().iter().map(|c| c.order() as i64).sum();
        ensure(orders == 2 * m.genus() as i64 - 2, || format!("{name}: orders {orders}, genus {}", m.genus()))?;
    }
    Ok(format!("{} surfaces ({} random origamis)", surfaces.len(), random))
}

fn coprime_count(l: i64) -> usize {
    let mut n = 0;
    for a in -l..=l {
        for b in -l..=l {
            if (a, b) != (0, 0) && a * a + b * b <= l * l && num_gcd(a, b) == 1 {
                n += 1;
            }
        }
    }
    n
}

fn num_gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn torus_counts() -> Outcome {
    let t = builders::torus();
    for l in 1..=20 {
        let got = parallel::saddle_connections(&t, &ExactReal::from_int(l), lim()).map_err(|e| e.to_string())?.len();
        let want = coprime_count(l);
        ensure(got == want, || format!("L = {l}: {got} saddle connections, oracle {want}"))?;
    }
    Ok(format!("L = 1..20 match, {} at L = 20", coprime_count(20)))
}

fn random_sl2_float(rng: &mut ChaCha8Rng) -> Mat2 {
    let a: f64 = rng.gen_range(0.2..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let b: f64 = rng.gen_range(-3.0..3.0);
    let c: f64 = rng.gen_range(-3.0..3.0);
    let d = (1.0 + b * c) / a;
    if rng.gen_bool(0.1) {
        // exercise the a = 0 branches
        Mat2::float(0.0, -1.0 / c, c, d)
    } else {
        Mat2::float(a, b, c, d)
    }
}

fn random_sl2_rational(rng: &mut ChaCha8Rng) -> Mat2 {
    let word: Vec<(bool, i64)> = (0..rng.gen_range(0..5)).map(|_| (rng.gen_bool(0.5), rng.gen_range(-3..=3))).collect();
    let (r, s) = (rng.gen_range(1..6), rng.gen_range(1..6));
    Mat2::product(&[Mat2::diag(ExactReal::from_ratio(r, s), ExactReal::from_ratio(s, r)), word_matrix(&word)]).unwrap()
}

fn decomposition_round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..5000 {
        let m = random_sl2_float(&mut rng);
        for f in [iwasawa(&m), cartan(&m), bruhat(&m)] {
            let f = f.map_err(|e| format!("{m}: {e}"))?;
            let r = f.residual(&m);
            worst = worst.max(r);
            ensure(r < 1e-12, || format!("{:?} residual {r:e} on {m}", f.kind))?;
        }
    }
    let mut branch = 0;
    for _ in 0..5000 {
        let m = random_sl2_rational(&mut rng);
        let b = bruhat(&m).map_err(|e| e.to_string())?;
        ensure(b.recompose().unwrap() == m, || format!("bruhat not exact on {m}"))?;
        let i = iwasawa(&m).map_err(|e| e.to_string())?;
        ensure(i.factors.iter().all(|f| f.is_exact()), || format!("iwasawa fell back to floats on {m}"))?;
        ensure(i.recompose().unwrap() == m, || format!("iwasawa not exact on {m}"))?;
        let c = cartan(&m).map_err(|e| e.to_string())?;
        ensure(c.residual(&m) < 1e-12, || format!("cartan residual on {m}"))?;
        let [a, bb, cc, _] = m.as_exact().unwrap().clone();
        if !a.is_zero() {
            // A = [[1,0],[c/a,1]] · diag(a, 1/a) · [[1,b/a],[0,1]]
            let one = ExactReal::one();
            let zero = ExactReal::zero();
            let expect = [
                Mat2::exact(one.clone(), zero.clone(), &cc / &a, one.clone()),
                Mat2::exact(a.clone(), zero.clone(), zero.clone(), a.try_recip().unwrap()),
                Mat2::exact(one.clone(), &bb / &a, zero, one),
            ];
            ensure(b.factors == expect && !b.iota_branch, || format!("bruhat factors differ from the formula on {m}"))?;
            branch += 1;
        }
    }
    Ok(format!("10000 matrices, worst float residual {worst:.1e}, {branch} exact a != 0 Bruhat checks"))
}

fn cartan_divergence() -> Outcome {
    let mut last = 0.0;
    let mut out = Vec::new();
    for (s, floor) in [(10.0, 10.0), (100.0, 100.0), (1000.0, 1000.0)] {
        let f = cartan(&Mat2::h_float(s)).map_err(|e| e.to_string())?;
        let diag = f.factors[1].to_float();
        let big = diag[0].max(diag[3]);
        ensure(big > floor && big > last, || format!("s = {s}: diagonal {big}"))?;
        last = big;
        out.push(format!("{big:.4}"));
    }
    Ok(format!("a-part {}", out.join(", ")))
}

fn tracking() -> Outcome {
    let psis: Vec<f64> = (1..=6).map(|k| 10f64.powi(-k)).collect();
    let mut worst: f64 = 0.0;
    for (name, m) in [("octagon", builders::octagon()), ("golden-l", builders::golden_l())] {
        for t in [0.5, 1.0, 2.0] {
            let recs = track_experiment(&m, &[t], &psis);
            for w in recs.windows(2) {
                ensure(w[1].distance <= w[0].distance, || format!("{name}, t = {t}: not monotone at psi = {}", w[1].psi))?;
            }
            let last = recs.last().unwrap().distance;
            ensure(last < 1e-3, || format!("{name}, t = {t}: distance {last:e} at psi = 1e-6"))?;
            worst = worst.max(last);
        }
    }
    Ok(format!("largest distance at psi = 1e-6: {worst:.3e}"))
}

fn lattice_parabolicity() -> Outcome {
    let bound = q("8");
    let mut summary = Vec::new();
    for (name, m) in [("golden-l", builders::golden_l()), ("octagon", builders::octagon()), ("l3", builders::three_square_l())] {
        let reports = parallel::periodic_scan(&m, &bound, lim()).map_err(|e| e.to_string())?;
        for r in &reports {
            ensure(r.is_decomposed() && r.moduli_qdim == 1, || format!("{name}: direction {} gave {:?}", r.direction, r))?;
        }
        let rows = survey_from_reports(&reports).map_err(|e| e.to_string())?;
        for (r, row) in reports.iter().zip(&rows) {
            let p = row.period.as_ref().ok_or_else(|| format!("{name}: no period in direction {}", r.direction))?;
            ensure(period_is_valid(p, &r.moduli), || format!("{name}: bad period {p}"))?;
        }
        summary.push(format!("{name} {} directions", reports.len()));
    }
    let dec = decompose(&builders::three_square_l(), &V2::ints(1, 0), &q("20"), lim()).map_err(|e| e.to_string())?;
    let mut moduli = dec.moduli();
    moduli.sort();
    ensure(moduli == vec![q("1/2"), q("1")], || format!("l3 horizontal moduli {moduli:?}"))?;
    let h = h_minimal_analysis(&dec).map_err(|e| e.to_string())?;
    ensure(h.torus_dim == 1 && h.period == Some(q("2")), || format!("l3 horizontal torus {h:?}"))?;
    Ok(summary.join(", "))
}

fn witness() -> Outcome {
    let m = builders::stretched_l();
    let (ev, _) = parallel::lattice_evidence(&m, &q("4"), lim()).map_err(|e| e.to_string())?;
    ensure(ev.verdict == Verdict::WitnessAgainst, || format!("verdict {}", ev.verdict))?;
    let horizontal = ev
        .witnesses
        .iter()
        .find(|w| w.direction.parallel(&V2::ints(1, 0)))
        .ok_or("horizontal direction is not among the witnesses")?;
    ensure(horizontal.moduli == vec![q("1/2"), q("sqrt(2)")] && horizontal.moduli_qdim == 2, || format!("{horizontal:?}"))?;
    let h = h_minimal_from_moduli(&horizontal.moduli).map_err(|e| e.to_string())?;
    ensure(h.torus_dim == 2 && h.period.is_none(), || format!("{h:?}"))?;
    Ok(format!("{} witnesses among {} directions", ev.witnesses.len(), ev.directions_scanned))
}

fn full_twists() -> Outcome {
    let mut n = 0;
    for m in [builders::torus(), builders::three_square_l()] {
        let dec = decompose(&m, &V2::ints(1, 0), &q("20"), lim()).map_err(|e| e.to_string())?;
        for (i, c) in dec.cylinders.iter().enumerate() {
            let t = c.circumference.try_div(&c.height).unwrap();
            let s = shear_cylinders(&m, &dec, &[i], &t).map_err(|e| e.to_string())?;
            ensure(equivalent(&s, &m).unwrap(), || format!("cylinder {i} twist by {t} is not equivalent"))?;
            n += 1;
        }
    }
    Ok(format!("{n} single-cylinder twists"))
}

fn sorted_holonomies(list: &[SaddleConnection]) -> Vec<V2> {
    let mut v: Vec<V2> = list.iter().map(|s| s.holonomy.clone()).collect();
    v.sort_by(|a, b| a.x.cmp(&b.x).then_with(|| a.y.cmp(&b.y)));
    v
}

fn apply(a: &Mat2, v: &V2) -> V2 {
    let (x, y) = a.apply_exact(&(v.x.clone(), v.y.clone())).unwrap();
    V2::new(x, y)
}

fn equivariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let surfaces = [builders::golden_l(), builders::three_square_l(), builders::octagon(), builders::torus()];
    let bound = q("3");
    let mut total = 0;
    for k in 0..20 {
        let m = &surfaces[k % surfaces.len()];
        let r = ExactReal::from_ratio(rng.gen_range(1..=3), rng.gen_range(1..=3));
        let s = ExactReal::from_ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3));
        let (zero, rinv) = (ExactReal::zero(), r.try_recip().unwrap());
        let a = if rng.gen_bool(0.5) { Mat2::exact(r, s, zero, rinv) } else { Mat2::exact(r, zero, s, rinv) };
        let base = saddle_connections(m, &bound, lim()).map_err(|e| e.to_string())?;
        let mut image: Vec<V2> = sorted_holonomies(&base).iter().map(|v| apply(&a, v)).collect();
        image.sort_by(|p, r| p.x.cmp(&r.x).then_with(|| p.y.cmp(&r.y)));
        // |Av|² ≤ ‖A‖_F² |v|², so this cutoff on A·M covers the image exactly
        let frob_sq = a.as_exact().unwrap().iter().fold(ExactReal::zero(), |acc, x| acc + x.square());
        let am = m.apply_matrix(&a).map_err(|e| e.to_string())?;
        let tri = delaunay(&am).map_err(|e| e.to_string())?;
        let wide = saddle_connections_in(&tri, &(&bound.square() * &frob_sq), lim()).map_err(|e| e.to_string())?;
        let inv = a.inverse().unwrap();
        let direct: Vec<V2> =
            sorted_holonomies(&wide).into_iter().filter(|v| apply(&inv, v).norm_sq() <= bound.square()).collect();
        ensure(image == direct, || format!("matrix {a}: {} vs {} holonomies", image.len(), direct.len()))?;
        total += image.len();
    }
    Ok(format!("20 matrices, {total} holonomies matched"))
}

fn json_round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(kind: &str, x: &T) -> Result<(), String> {
    let text = to_json(kind, x).map_err(|e| e.to_string())?;
    let back: T = from_json(kind, &text).map_err(|e| format!("{kind}: {e}"))?;
    ensure(&back == x, || format!("{kind}: json value changed"))?;
    ensure(to_json(kind, &back).unwrap() == text, || format!("{kind}: json bytes changed"))
}

fn csv_round_trip<T: Table + PartialEq + std::fmt::Debug>(x: &T) -> Result<(), String> {
    let text = to_csv(x).map_err(|e| e.to_string())?;
    let back: T = from_csv(&text).map_err(|e| format!("{}: {e}", T::KIND))?;
    ensure(&back == x, || format!("{}: csv value changed", T::KIND))?;
    ensure(to_csv(&back).unwrap() == text, || format!("{}: csv bytes changed", T::KIND))
}

fn format_round_trip() -> Outcome {
    for (name, m) in all_builders() {
        let text = print_surface(&m).unwrap();
        let back = parse_surface_text(&text).map_err(|e| format!("{name}: {e}"))?;
        ensure(print_surface(&back).unwrap() == text, || format!("{name}: surface text changed"))?;
        ensure(back.to_spec().unwrap() == m.to_spec().unwrap(), || format!("{name}: surface changed"))?;
        let doc = SurfaceDoc::from_surface(&m).unwrap();
        json_round_trip("surface", &doc)?;
        ensure(doc.to_surface().unwrap().to_spec().unwrap() == m.to_spec().unwrap(), || format!("{name}: json surface"))?;
    }
    let m = builders::stretched_l();
    let lim = lim();
    let saddles = saddle_connections(&m, &q("3"), lim).unwrap();
    json_round_trip("saddles", &saddles)?;
    csv_round_trip(&saddles)?;
    let (evidence, reports) = parallel::lattice_evidence(&m, &q("2"), lim).unwrap();
    json_round_trip::<Vec<DirectionReport>>("direction_reports", &reports)?;
    csv_round_trip(&reports)?;
    json_round_trip("lattice_scan", &LatticeScan { evidence, reports: reports.clone() })?;
    let rows: Vec<SurveyRow> = survey_from_reports(&reports).unwrap();
    json_round_trip("orbit_survey", &rows)?;
    csv_round_trip(&rows)?;
    let dec: CylinderDecomposition = decompose(&builders::golden_l(), &V2::ints(1, 1), &q("40"), lim).unwrap();
    json_round_trip("cylinders", &dec)?;
    let hmin = HMinRecord {
        direction: dec.direction.clone(),
        status: dec.status.clone(),
        moduli: dec.moduli(),
        analysis: Some(h_minimal_analysis(&dec).unwrap()),
    };
    json_round_trip("hmin", &hmin)?;
    let track: Vec<TrackRecord> = track_experiment(&builders::octagon(), &[0.5, 2.0], &[1e-1, 1e-4, 0.0]);
    json_round_trip("track", &track)?;
    csv_round_trip(&track)?;
    let a = Mat2::from_ints(2, 1, 1, 1);
    let factors: Vec<FactorRecord> = [DecompositionKind::Iwasawa, DecompositionKind::Cartan, DecompositionKind::Bruhat]
        .into_iter()
        .map(|k| {
            let f = flatlab_core::sl2::decompose(k, &a).unwrap();
            FactorRecord { residual: f.residual(&a), factorization: f }
        })
        .collect();
    json_round_trip("sl2_decompose", &factors)?;
    let summary = SurfaceSummary {
        field: "sqrt(2)".into(),
        polygons: 1,
        genus: 2,
        stratum: "H(2)".into(),
        area: "2+2*sqrt(2)".into(),
        cone_angles: vec![3],
        systole_sq: Some(q("1")),
        in_thick_part: Some(true),
    };
    json_round_trip("surface_summary", &summary)?;
    json_round_trip::<Vec<DirectionReport>>("direction_reports", &Vec::new())?;
    csv_round_trip::<Vec<SurveyRow>>(&Vec::new())?;
    Ok(format!("{} builder surfaces, 11 report types", all_builders().len()))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "Gauss-Bonnet on builders and random origamis", limit: Duration::from_secs(5), run: gauss_bonnet },
        Criterion { id: 2, name: "torus saddle counts vs coprime lattice points", limit: Duration::from_secs(30), run: torus_counts },
        Criterion { id: 3, name: "Iwasawa/Cartan/Bruhat round trips", limit: Duration::from_secs(10), run: decomposition_round_trips },
        Criterion { id: 4, name: "Cartan a-part diverges along h_s", limit: Duration::from_secs(1), run: cartan_divergence },
        Criterion { id: 5, name: "rotation vs horocycle tracking distances", limit: Duration::from_secs(10), run: tracking },
        Criterion { id: 6, name: "lattice parabolicity scan at L = 8", limit: Duration::from_secs(300), run: lattice_parabolicity },
        Criterion { id: 7, name: "stretched L witness against lattice", limit: Duration::from_secs(30), run: witness },
        Criterion { id: 8, name: "full cylinder twists are equivalences", limit: Duration::from_secs(10), run: full_twists },
        Criterion { id: 9, name: "saddle holonomy equivariance", limit: Duration::from_secs(60), run: equivariance },
        Criterion { id: 10, name: "surface and report format round trips", limit: Duration::from_secs(5), run: format_round_trip },
    ];
    let only: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in criteria.iter().filter(|c| only.is_none_or(|id| id == c.id)) {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if took <= c.limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("over time limit; {d}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {:>2}: {status}  {}  [{:.2}s / limit {}s]  {detail}",
            c.id,
            c.name,
            took.as_secs_f64(),
            c.limit.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
