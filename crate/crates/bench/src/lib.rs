//! Benchmark fixtures shared by the criterion targets.

use rigged_core::{
    build_similarity_exact, MetricOperator, OperatorMatrix, SwansonPath, SwansonSpec, Tolerances,
};

/// Similarity-exact Swanson instance at the reference point `(2, 0.5, 0.25)`.
pub fn swanson_exact(n: usize) -> (OperatorMatrix, MetricOperator) {
    let spec = SwansonSpec::new(2.0, 0.5, 0.25, n, SwansonPath::SimilarityExact);
    let (h, m, _) =
        build_similarity_exact(&spec, &Tolerances::default()).expect("reference point is valid");
    (h, m)
}
