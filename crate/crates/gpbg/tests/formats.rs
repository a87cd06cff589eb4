use num_complex::Complex64;
use proptest::prelude::*;

use gpbg::formats::{decode_gpgf, encode_gpgf, map_from_json, map_to_json, write_atomic};
use gpbg::grid::{Grid, GridFunction};
use gpbg_core::map::CollisionMap;

#[test]
fn gpgf_file_round_trip() {
    let grid = Grid::new(16, 3.0).unwrap();
    let f = GridFunction::gaussian(grid, 1.5, 0.4);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phi.gpgf");
    write_atomic(&path, &encode_gpgf(&f)).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(&bytes[..4], b"GPGF");
    assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
    assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 16);
    assert_eq!(bytes.len(), 16 + 16 * 16);
    let back = decode_gpgf(&bytes, 3.0).unwrap();
    assert_eq!(back.values, f.values);
}

#[test]
fn gpgf_rejects_corruption() {
    let f = GridFunction::zeros(Grid::new(8, 1.0).unwrap());
    let bytes = encode_gpgf(&f);
    assert!(decode_gpgf(&bytes[..bytes.len() - 1], 1.0).is_err());
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(decode_gpgf(&bad, 1.0).is_err());
    let mut v2 = bytes;
    v2[4] = 2;
    assert!(decode_gpgf(&v2, 1.0).is_err());
}

#[test]
fn atomic_write_replaces_existing_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    write_atomic(&path, b"first").unwrap();
    write_atomic(&path, b"second").unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), b"second");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

proptest! {
    #[test]
    fn gpgf_bits_round_trip(values in prop::collection::vec((any::<f64>(), any::<f64>()), 8)) {
        let grid = Grid::new(8, 1.0).unwrap();
        let f = GridFunction::new(grid, values.iter().map(|&(a, b)| Complex64::new(a, b)).collect()).unwrap();
        let back = decode_gpgf(&encode_gpgf(&f), 1.0).unwrap();
        for (x, y) in f.values.iter().zip(&back.values) {
            prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
            prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }

    #[test]
    fn map_json_round_trip(k in 1usize..4, raw in prop::collection::vec(0usize..1000, 1..7)) {
        let mu: Vec<usize> = raw.iter().enumerate().map(|(i, r)| 1 + r % (k + i)).collect();
        let m = CollisionMap::new(k, mu).unwrap();
        let text = map_to_json(&m).to_string();
        let back = map_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, m);
    }
}
