use proptest::prelude::*;

use qda::io::{read_matrix, read_permutation, write_matrix, write_permutation, MatrixFile};
use qda::solve::exit_code;
use qda_core::driver::Status;
use qda_core::{ComplexMatrix, Permutation, C64};

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE / 8.0),
        Just(f64::MAX),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_file_roundtrip_is_bit_exact(rows in 1usize..6, cols in 1usize..6, vals in prop::collection::vec(finite(), 72)) {
        let a = ComplexMatrix::from_fn(rows, cols, |i, j| C64::new(vals[2 * (i * cols + j)], vals[2 * (i * cols + j) + 1]));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.json");
        write_matrix(&p, &a).unwrap();
        let b = read_matrix(&p).unwrap();
        let bits = |m: &ComplexMatrix| m.data().iter().flat_map(|z| [z.re.to_bits(), z.im.to_bits()]).collect::<Vec<_>>();
        prop_assert_eq!((b.rows(), b.cols()), (rows, cols));
        prop_assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn permutation_file_roundtrip(n in 1usize..30, seed in any::<u64>()) {
        let p = qda_core::problems::random_permutation(n, &mut qda_core::problems::stream_rng(seed, 1));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.json");
        write_permutation(&path, &p).unwrap();
        prop_assert_eq!(read_permutation(&path).unwrap(), p);
    }
}

#[test]
fn matrix_file_is_row_major() {
    let a = ComplexMatrix::from_fn(2, 3, |i, j| C64::new((3 * i + j) as f64, -((3 * i + j) as f64)));
    let f = MatrixFile::from_matrix(&a);
    assert_eq!(f.re, [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    assert_eq!(f.im[5], -5.0);
    let v = serde_json::to_value(&f).unwrap();
    assert_eq!(v["rows"], 2);
    assert_eq!(v["cols"], 3);
}

#[test]
fn permutation_file_rejects_non_permutations() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("q.json");
    std::fs::write(&p, "[0, 0, 2]").unwrap();
    assert!(read_permutation(&p).is_err());
    write_permutation(&p, &Permutation::block_swap(1, 2)).unwrap();
    assert_eq!(std::fs::read_to_string(&p).unwrap().split_whitespace().collect::<String>(), "[2,0,1]");
}

#[test]
fn exit_codes_cover_every_status() {
    assert_eq!(exit_code(Status::Converged), 0);
    assert_eq!(exit_code(Status::MaxIter), 2);
    assert_eq!(exit_code(Status::Breakdown), 3);
}
