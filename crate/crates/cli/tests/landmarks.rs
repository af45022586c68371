use std::path::Path;

use manifold_mom::Point64;
use manifold_mom_cli::landmarks::{
    bundled_hands, format_landmarks, parse_landmarks, write_landmarks,
};
use manifold_mom_cli::{load_landmarks, CliError};

fn parse(text: &str) -> Result<manifold_mom_cli::LandmarkDataset, CliError> {
    parse_landmarks(text, Path::new("test.csv"))
}

fn assert_preshape(p: &Point64) {
    let pts = p.landmarks();
    let n = pts.len() as f64;
    let cx = pts.iter().map(|q| q[0]).sum::<f64>() / n;
    let cy = pts.iter().map(|q| q[1]).sum::<f64>() / n;
    assert!(cx.abs() < 1e-14 && cy.abs() < 1e-14);
    assert!((p.coords().norm() - 1.0).abs() < 1e-14);
}

#[test]
fn unit_square_becomes_a_preshape() {
    let d = parse("# landmarks=4\n0,0,1,0,1,1,0,1\n").unwrap();
    assert_eq!((d.len(), d.landmarks), (1, 4));
    assert_preshape(&d.shapes[0]);
    // Every corner sits at the same distance from the centroid.
    for q in d.shapes[0].landmarks() {
        assert!((q[0].hypot(q[1]) - 0.5).abs() < 1e-15);
    }
}

#[test]
fn zero_size_shape_is_degenerate() {
    let zeros = vec!["0"; 144].join(",");
    let err = parse(&format!("# landmarks=72\n{zeros}\n")).unwrap_err();
    assert!(
        matches!(err, CliError::DegenerateShape { line: 2, .. }),
        "{err}"
    );
    assert_eq!(err.exit_code(), 3);
    let same = ["2.5"; 8].join(",");
    assert!(matches!(
        parse(&format!("# landmarks=4\n{same}\n")),
        Err(CliError::DegenerateShape { .. })
    ));
}

#[test]
fn parse_errors_carry_their_location() {
    let cases = [
        ("0,0,1,0,1,1\n", 1, 1),
        ("# landmarks=two\n", 1, 1),
        ("# landmarks=3\n0,0,1,0,1,1\n0,0,1,x,1,1\n", 3, 4),
        ("# landmarks=3\n0,0,1,0,1\n", 2, 6),
        ("# landmarks=3\n0,0,1,0,1,1,5\n", 2, 7),
        ("# landmarks=3\n\n0,0,inf,0,1,1\n", 3, 3),
    ];
    for (text, line, column) in cases {
        match parse(text) {
            Err(CliError::Parse {
                line: l, column: c, ..
            }) => assert_eq!((l, c), (line, column), "{text:?}"),
            other => panic!("{text:?}: {other:?}"),
        }
    }
    assert!(matches!(parse(""), Err(CliError::Parse { .. })));
}

#[test]
fn comments_and_blank_lines_are_skipped() {
    let d = parse("\n# landmarks=3\n# a triangle\n0,0,1,0,0,1\n\n2,0,3,0,2,1\n").unwrap();
    assert_eq!(d.len(), 2);
    assert!((d.shapes[0].coords() - d.shapes[1].coords()).norm() < 1e-15);
}

#[test]
fn written_files_load_back_to_the_same_preshapes() {
    let data = bundled_hands().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/hands.csv");
    write_landmarks(&path, &data.shapes).unwrap();
    let back = load_landmarks(&path).unwrap();
    assert_eq!((back.len(), back.landmarks), (data.len(), data.landmarks));
    for (a, b) in data.shapes.iter().zip(&back.shapes) {
        assert!((a.coords() - b.coords()).amax() <= 1e-12);
    }
    assert!(format_landmarks(&data.shapes).starts_with("# landmarks=72\n"));
}

#[test]
fn bundled_hands_are_eighteen_preshapes() {
    let d = bundled_hands().unwrap();
    assert_eq!((d.len(), d.landmarks), (18, 72));
    d.shapes.iter().for_each(assert_preshape);
}

#[test]
fn missing_file_is_a_read_error() {
    let err = load_landmarks(Path::new("/nonexistent/hands.csv")).unwrap_err();
    assert!(matches!(err, CliError::Read { .. }));
    assert_eq!(err.exit_code(), 3);
}
