//! Golden fixture matrices and helpers shared by the integration and
//! acceptance suites. The JSON files under `fixtures/` are generated from
//! these definitions (see `fixtures.rs`) and the drift test keeps them in
//! sync.

use std::path::PathBuf;

use rankone::tensor::kron_list;
use rankone::ComplexMatrix;
use rankone_cli::bundle::{read_matrix_file, MatrixFile};

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("..")
        .join("fixtures")
}

pub fn load_fixture(name: &str) -> ComplexMatrix {
    let path = fixtures_dir().join(name);
    read_matrix_file(&path)
        .unwrap_or_else(|e| panic!("fixture {name}: {e}"))
        .to_matrix()
        .unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

pub fn write_fixture(name: &str, m: &ComplexMatrix) {
    let path = fixtures_dir().join(name);
    std::fs::create_dir_all(fixtures_dir()).unwrap();
    std::fs::write(&path, MatrixFile::from_matrix(m).canonical_json())
        .unwrap_or_else(|e| panic!("writing {name}: {e}"));
}

/// 6×4 injective factor for the bipartite realignment map on (2,3).
pub fn example1_m() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
        vec![0.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 0.0],
    ])
    .unwrap()
}

/// 6×9 factor whose kernel is {(a,b,c,d,a,b,c,d,0)}, rank 5.
pub fn example1_n() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        vec![1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0],
        vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0],
        vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    ])
    .unwrap()
}

/// 6×12 factor `[I₆ | Ŵ]` with a 6-dimensional kernel that still avoids
/// every product vector of ℂ²⊗ℂ²⊗ℂ³.
pub fn example2_m() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0],
    ])
    .unwrap()
}

/// 6×3 injective companion to [`example2_m`].
pub fn example2_n() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![0.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0],
    ])
    .unwrap()
}

/// The 9×9 nilpotent-plus-shift block used to build [`example3_m`];
/// `Ker(R⁴) = {(a,b,c,d,a,b,c,d,0)}`.
pub fn example3_r() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        vec![-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        vec![-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    ])
    .unwrap()
}

/// 9×81 block row `[I₉ R R² R³ −I₉ −R −R² −R³ R⁴]` whose kernel avoids every
/// product vector of ℂ³⊗ℂ³⊗ℂ³⊗ℂ³.
pub fn example3_m() -> ComplexMatrix {
    let r = example3_r();
    let i9 = ComplexMatrix::identity(9);
    let r2 = r.mul(&r).unwrap();
    let r3 = r2.mul(&r).unwrap();
    let r4 = r3.mul(&r).unwrap();
    let neg = |m: &ComplexMatrix| m.scale(num_complex::Complex64::new(-1.0, 0.0));
    let blocks = [
        i9.clone(),
        r.clone(),
        r2.clone(),
        r3.clone(),
        neg(&i9),
        neg(&r),
        neg(&r2),
        neg(&r3),
        r4,
    ];
    let mut out = blocks[0].clone();
    for b in &blocks[1..] {
        out = out.hstack(b).unwrap();
    }
    out
}

/// 9×1 nonzero column completing the vec-form map `A ↦ M vec(A) Nᵀ`.
pub fn example3_n() -> ComplexMatrix {
    let mut n = ComplexMatrix::zeros(9, 1);
    n.set(0, 0, num_complex::Complex64::new(1.0, 0.0));
    n
}

pub fn all_fixture_defs() -> Vec<(&'static str, ComplexMatrix)> {
    vec![
        ("example1_m.json", example1_m()),
        ("example1_n.json", example1_n()),
        ("example2_m.json", example2_m()),
        ("example2_n.json", example2_n()),
        ("example3_r.json", example3_r()),
        ("example3_m.json", example3_m()),
        ("example3_n.json", example3_n()),
    ]
}

/// Realizes `⊗ᵢ xᵢyᵢᵀ` from slices, for quick test inputs.
pub fn product_matrix(xs: &[&[num_complex::Complex64]], ys: &[&[num_complex::Complex64]]) -> ComplexMatrix {
    let x_mats: Vec<ComplexMatrix> = xs.iter().map(|x| ComplexMatrix::column(x)).collect();
    let y_mats: Vec<ComplexMatrix> = ys.iter().map(|y| ComplexMatrix::row(y)).collect();
    let outers: Vec<ComplexMatrix> = x_mats
        .iter()
        .zip(&y_mats)
        .map(|(x, y)| x.mul(y).unwrap())
        .collect();
    let refs: Vec<&ComplexMatrix> = outers.iter().collect();
    kron_list(&refs)
}
