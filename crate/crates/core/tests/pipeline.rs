use gapnn::format::{emit_model, parse_model};
use gapnn::synthetic::{build_dissimilarity, cross_dissimilarity, Family, FamilySpec};
use gapnn::{
    classify_1nn, estimate_gap, fit, predict_batch, DissimilarityMatrix, LabeledDataset, Mode,
    Outcome,
};
use proptest::prelude::*;

/// Random symmetric dataset whose cross-class values all exceed its
/// within-class values.
fn separable_dataset() -> impl Strategy<Value = LabeledDataset> {
    (2usize..30).prop_flat_map(|n| {
        (
            proptest::collection::vec(0.0f64..1.0, n * n),
            proptest::collection::vec(any::<bool>(), n),
            0.05f64..2.0,
        )
            .prop_map(move |(raw, mut side, gap)| {
                side[0] = true;
                side[n - 1] = false;
                let mut v = vec![0.0; n * n];
                for i in 0..n {
                    for j in i + 1..n {
                        let base = raw[i * n + j];
                        let x = if side[i] == side[j] {
                            base + 1e-3
                        } else {
                            gap + 1.0 + base
                        };
                        v[i * n + j] = x;
                        v[j * n + i] = x;
                    }
                }
                let labels: Vec<&str> =
                    side.iter().map(|&a| if a { "yes" } else { "no" }).collect();
                LabeledDataset::new(DissimilarityMatrix::square(n, v).unwrap(), &labels).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn training_rows_are_never_rejected_or_misclassified(
        d in separable_dataset(),
        frac in 0.05f64..0.95,
    ) {
        let delta = estimate_gap(&d).unwrap();
        let model = fit(&d, Some(frac * delta), None).unwrap();
        let decisions = predict_batch(&model, d.matrix(), Mode::Rules).unwrap();
        for (i, dec) in decisions.iter().enumerate() {
            let want = if d.labels()[i] == model.label_a() { Outcome::ClassA } else { Outcome::ClassB };
            prop_assert_eq!(dec.outcome, want);
        }
    }

    #[test]
    fn smooth_agrees_with_nn_on_covered_rows(
        d in separable_dataset(),
        t in 0.01f64..0.999,
    ) {
        let model = fit(&d, None, None).unwrap();
        let bound = model.s_bound();
        let s = if bound.is_finite() { t * bound } else { t * (model.delta_hat() - model.eps()) };
        let smooth = predict_batch(&model.with_s(s).unwrap(), d.matrix(), Mode::Smooth).unwrap();
        for (i, dec) in smooth.iter().enumerate() {
            let row = d.matrix().row(i);
            let a: Vec<f64> = model.prototypes_a().iter().map(|&p| row[p]).collect();
            let b: Vec<f64> = model.prototypes_b().iter().map(|&p| row[p]).collect();
            prop_assert_eq!(dec.outcome, classify_1nn(&a, &b).unwrap().outcome);
        }
    }

    #[test]
    fn model_text_roundtrips(d in separable_dataset()) {
        let model = fit(&d, None, None).unwrap();
        prop_assert_eq!(parse_model(&emit_model(&model)).unwrap(), model);
    }
}

// The cover reaches in either direction but the rules read D(row, p) only,
// so an asymmetric training row can land outside its own prototype's ball.
#[test]
fn asymmetric_training_row_can_be_rejected() {
    let m = DissimilarityMatrix::square(
        3,
        vec![
            0.0, 0.1, 5.0, //
            3.0, 0.0, 5.0, //
            5.0, 5.0, 0.0,
        ],
    )
    .unwrap();
    let d = LabeledDataset::new(m, &["a", "a", "b"]).unwrap();
    let model = fit(&d, Some(1.0), None).unwrap();
    assert_eq!(model.prototypes_a(), &[0]);
    let out = predict_batch(&model, d.matrix(), Mode::Rules).unwrap();
    assert_eq!(out[1].outcome, Outcome::RejectOutlier);
}

#[test]
fn box_family_end_to_end() {
    let spec = FamilySpec::new(Family::Box, 200, 5);
    let train = spec.train_objects().unwrap();
    let test = spec.test_objects(300).unwrap();
    let d = build_dissimilarity(&train, spec.measure).unwrap();
    let t = cross_dissimilarity(&train, &test, spec.measure).unwrap();
    let model = fit(&d, None, None).unwrap();
    let out = predict_batch(&model, &t, Mode::Rules).unwrap();
    for (dec, obj) in out.iter().zip(&test) {
        match dec.outcome {
            Outcome::ClassA => assert_eq!(obj.true_label, "A"),
            Outcome::ClassB => assert_eq!(obj.true_label, "B"),
            _ => {}
        }
    }
    // identical inputs, identical bits
    let again = predict_batch(&model, &t, Mode::Smooth).unwrap();
    let once = predict_batch(&model, &t, Mode::Smooth).unwrap();
    assert!(again
        .iter()
        .zip(&once)
        .all(|(x, y)| x.score.unwrap().to_bits() == y.score.unwrap().to_bits()));
}
