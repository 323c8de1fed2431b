use std::f64::consts::TAU;

use eqcnn::embedding::{EmbeddingKind, EmbeddingTag, ImageTensor};
use eqcnn::model::{
    nonequivariant_config, table1_config, validate_equivariance, Model, ModelConfig,
};
use eqcnn::symmetry::Symmetry;
use proptest::prelude::*;

fn all_table1(n: usize) -> Vec<ModelConfig> {
    let mut out = Vec::new();
    for symmetry in [Symmetry::Reflection, Symmetry::Rotation] {
        for tag in [EmbeddingTag::Standard, EmbeddingTag::Ae1, EmbeddingTag::Ae2] {
            out.push(table1_config(n, EmbeddingKind::new(tag, symmetry)).unwrap());
        }
    }
    out
}

fn image(rows: usize, cols: usize, px: &[f64]) -> ImageTensor {
    ImageTensor::new(rows, cols, px[..rows * cols].to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn equivariant_models_are_invariant(
        px in prop::collection::vec(0.01f64..1.0, 1024),
        params in prop::collection::vec(0.0f64..TAU, 64),
    ) {
        for n in [8, 10] {
            for cfg in all_table1(n) {
                let model = Model::new(cfg).unwrap();
                let (rows, cols) = model.embedding().image_dims();
                let gap = model.invariance_gap(&params[..model.n_params()], &image(rows, cols, &px)).unwrap();
                prop_assert!(gap <= 1e-10, "{}: {gap}", model.config().name);
            }
        }
    }
}

#[test]
fn nonequivariant_model_breaks_symmetry() {
    let model = Model::new(nonequivariant_config(8, Symmetry::Reflection).unwrap()).unwrap();
    let px: Vec<f64> = (0..256)
        .map(|k| ((k * 37) % 101) as f64 / 101.0 + 0.01)
        .collect();
    let params: Vec<f64> = (0..model.n_params())
        .map(|k| 0.3 + 0.7 * k as f64)
        .collect();
    assert!(model.invariance_gap(&params, &image(16, 16, &px)).unwrap() > 1e-3);
    assert!(!validate_equivariance(model.config()).unwrap().passed());
}

#[test]
fn audits_and_param_counts() {
    for n in [8, 10] {
        for cfg in all_table1(n) {
            let report = validate_equivariance(&cfg).unwrap();
            assert!(report.passed(), "{}", report.to_text());
            assert!(report.to_text().ends_with("verdict: PASS\n"));
            for layer in &cfg.layers {
                // Circuit 5 appears only where the reduced representation is trivial.
                let expect = if layer.conv.0 == [5] { 6 } else { 3 };
                assert_eq!(layer.conv_param_count().unwrap(), expect);
                assert_eq!(layer.param_count().unwrap(), expect + 2);
            }
        }
    }
    let noneq = nonequivariant_config(8, Symmetry::Reflection).unwrap();
    assert_eq!(noneq.param_count().unwrap(), 24);
    assert!(noneq
        .layers
        .iter()
        .all(|l| l.conv_param_count().unwrap() == 6));
}

#[test]
fn config_json_round_trip() {
    for cfg in all_table1(8) {
        let back = ModelConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
    assert!(ModelConfig::from_json("{\"name\": 3}").is_err());
}

#[test]
fn forward_rejects_wrong_shapes() {
    let model = Model::new(all_table1(8).remove(0)).unwrap();
    let img = ImageTensor::new(16, 16, vec![1.0; 256]).unwrap();
    assert!(model.forward(&[0.0; 3], &img).is_err());
    let small = ImageTensor::new(8, 8, vec![1.0; 64]).unwrap();
    assert!(model.forward(&vec![0.0; model.n_params()], &small).is_err());
    let f = model.forward(&vec![0.0; model.n_params()], &img).unwrap();
    assert!(f.abs() <= 1.0);
}
