use std::io::Cursor;

use blockkrylov::io::{
    load_block_vector, load_matrix_market, read_matrix_market, save_block_vector,
    save_matrix_market,
};
use blockkrylov::{poisson2d, random_block_rhs, CoefficientField, Error, PoissonSpec};

#[test]
fn matrix_and_block_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = PoissonSpec::new(5, 4, CoefficientField::LogUniform { contrast: 2.0 }, 3).unwrap();
    let a = poisson2d(&spec).unwrap();
    let mtx = dir.path().join("a.mtx");
    save_matrix_market(&a, &mtx).unwrap();
    assert_eq!(load_matrix_market(&mtx).unwrap(), a);

    let x = random_block_rhs(20, 3, 5);
    let path = dir.path().join("x.txt");
    save_block_vector(&x, &path).unwrap();
    assert_eq!(load_block_vector(&path).unwrap(), x);
}

#[test]
fn general_matrix_market_is_accepted_and_checked() {
    let text = "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 2.0\n1 2 1.0\n2 2 2.0\n";
    let err = read_matrix_market(Cursor::new(text)).unwrap_err();
    assert!(matches!(err, Error::NotSymmetric { .. }));
    let text = "%%MatrixMarket matrix coordinate real general\n2 2 4\n1 1 2.0\n1 2 1.0\n2 1 1.0\n2 2 2.0\n";
    assert_eq!(read_matrix_market(Cursor::new(text)).unwrap().nnz(), 4);
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(
        load_block_vector("/nonexistent/x.txt"),
        Err(Error::Io(_))
    ));
}
