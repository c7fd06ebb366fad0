//! Kept in its own binary: the matrix counter is process-wide.

use liemod::complexity::{assemble, ComplexityOptions};
use liemod::lie::action_matrices_built;

#[test]
fn coprime_degrees_build_no_matrices() {
    let before = action_matrices_built();
    for (n, p) in [(5usize, 2u32), (7, 2), (7, 3), (4, 3), (8, 3), (7, 5), (8, 7)] {
        let cert = assemble(n, p, &ComplexityOptions::default()).unwrap();
        assert_eq!((cert.value, cert.certified), (Some(0), true), "n = {n}, p = {p}");
        assert!(cert
            .subgroups
            .iter()
            .all(|s| s.summary.method == "point-stabilizer" && s.matrices_built == 0));
    }
    assert_eq!(action_matrices_built(), before);
    assemble(4, 2, &ComplexityOptions::default()).unwrap();
    assert!(action_matrices_built() > before);
}
