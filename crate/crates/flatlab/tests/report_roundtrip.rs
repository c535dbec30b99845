use flatlab::experiment::{SurveyRow, TrackRecord};
use flatlab::report::{from_csv, from_json, to_csv, to_json};
use flatlab_core::audit::DirectionReport;
use flatlab_core::cylinder::DecompositionStatus;
use flatlab_core::exact::ExactReal;
use flatlab_core::geom::V2;
use proptest::prelude::*;

fn scalar() -> impl Strategy<Value = ExactReal> {
    (-50i64..50, 1i64..20, -5i64..5, 1i64..7).prop_map(|(a, b, c, d)| {
        let s2: ExactReal = "sqrt(2)".parse().unwrap();
        ExactReal::from_ratio(a, b) + &ExactReal::from_ratio(c, d) * &s2
    })
}

fn report() -> impl Strategy<Value = DirectionReport> {
    (scalar(), scalar(), proptest::collection::vec(scalar(), 0..4), any::<bool>(), 0usize..4, proptest::option::of(scalar()))
        .prop_map(|(x, y, moduli, commensurable, moduli_qdim, saddle_length_ratio)| DirectionReport {
            direction: V2::new(x, y),
            status: if moduli.is_empty() {
                DecompositionStatus::Undecided { bound: ExactReal::from_int(40) }
            } else {
                DecompositionStatus::Decomposed
            },
            moduli,
            commensurable,
            moduli_qdim,
            saddle_length_ratio,
        })
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![any::<f64>().prop_filter("finite", |x| x.is_finite()), Just(0.0), Just(1e-300), Just(-0.0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn direction_reports(rs in proptest::collection::vec(report(), 0..6)) {
        let j = to_json("direction_reports", &rs).unwrap();
        prop_assert_eq!(&from_json::<Vec<DirectionReport>>("direction_reports", &j).unwrap(), &rs);
        let c = to_csv(&rs).unwrap();
        let back: Vec<DirectionReport> = from_csv(&c).unwrap();
        prop_assert_eq!(&back, &rs);
        prop_assert_eq!(to_csv(&back).unwrap(), c);
    }

    #[test]
    fn survey_rows(rows in proptest::collection::vec((scalar(), scalar(), 1usize..4, proptest::option::of(scalar())), 0..6)) {
        let rows: Vec<SurveyRow> = rows
            .into_iter()
            .map(|(p, q, d, period)| SurveyRow { direction_p: p, direction_q: q, d, period })
            .collect();
        let c = to_csv(&rows).unwrap();
        prop_assert_eq!(&from_csv::<Vec<SurveyRow>>(&c).unwrap(), &rows);
        let j = to_json("orbit_survey", &rows).unwrap();
        prop_assert_eq!(&from_json::<Vec<SurveyRow>>("orbit_survey", &j).unwrap(), &rows);
    }

    #[test]
    fn track_floats_exact(recs in proptest::collection::vec((finite(), finite(), finite()), 0..6)) {
        let recs: Vec<TrackRecord> = recs.into_iter().map(|(t, psi, distance)| TrackRecord { t, psi, distance }).collect();
        let j = to_json("track", &recs).unwrap();
        let back: Vec<TrackRecord> = from_json("track", &j).unwrap();
        prop_assert!(back.iter().zip(&recs).all(|(a, b)| a.t.to_bits() == b.t.to_bits()
            && a.psi.to_bits() == b.psi.to_bits() && a.distance.to_bits() == b.distance.to_bits()));
        let c = to_csv(&recs).unwrap();
        let back: Vec<TrackRecord> = from_csv(&c).unwrap();
        prop_assert_eq!(back, recs);
    }
}

#[test]
fn kind_mismatch_rejected() {
    let j = to_json("track", &Vec::<TrackRecord>::new()).unwrap();
    assert!(from_json::<Vec<TrackRecord>>("saddles", &j).is_err());
}

#[test]
fn empty_csv_has_header() {
    assert_eq!(to_csv(&Vec::<SurveyRow>::new()).unwrap().trim_end(), "direction_p,direction_q,d,period");
}
