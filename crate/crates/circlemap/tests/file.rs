use circlemap::*;
use numerics::*;

const TEXT: &str = r#"
family = "composition"
omega = "0.61803398874989484820458683436563811772030917980576"
precision_bits = 256

[[factors]]
kind = "diffeo"
amplitude = "0.1"

[[factors]]
beta = "0"
d = 3

[[factors]]
beta = "0.5"
d = 3
"#;

#[test]
fn parses_at_full_precision() {
    let s = MapSpecFile::parse(TEXT).unwrap().build(None).unwrap();
    assert_eq!(s.prec(), 256);
    assert_eq!(s.factors().len(), 3);
    let want = parse_real("0.61803398874989484820458683436563811772030917980576", 256).unwrap();
    assert_eq!(s.omega(), &want);
    assert_eq!(s.criticalities(), vec![3, 3]);
}

#[test]
fn explicit_precision_wins() {
    let s = MapSpecFile::parse(TEXT).unwrap().build(Some(128)).unwrap();
    assert_eq!(s.prec(), 128);
}

#[test]
fn round_trips_through_toml() {
    let s = MapSpecFile::parse(TEXT).unwrap().build(None).unwrap();
    let text = MapSpecFile::from_spec(&s).to_toml();
    let back = MapSpecFile::parse(&text).unwrap().build(None).unwrap();
    assert_eq!(s, back);
}

#[test]
fn rejects_bad_input() {
    let bad_family = TEXT.replace("composition", "blaschke");
    assert!(matches!(MapSpecFile::parse(&bad_family).unwrap().build(None), Err(CircleMapError::SpecFile(_))));
    let even = TEXT.replace("d = 3\n\n[[factors]]\nbeta = \"0.5\"", "d = 4\n\n[[factors]]\nbeta = \"0.5\"");
    assert_eq!(MapSpecFile::parse(&even).unwrap().build(None).unwrap_err(), CircleMapError::BadCriticality(4));
    assert!(MapSpecFile::parse("omega = 1").is_err());
    let low = TEXT.replace("256", "32");
    assert!(MapSpecFile::parse(&low).unwrap().build(None).is_err());
}
