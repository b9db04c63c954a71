use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ofw::bench::{load_ratings, parse_ratings, run_cf_compare, write_ratings, BenchConfig, RatingRecord};
use ofw::error::OfwError;

#[test]
fn thousand_records_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let records: Vec<RatingRecord> = (0..1000)
        .map(|_| RatingRecord {
            user: rng.gen_range(0..500),
            item: rng.gen_range(0..700),
            rating: rng.gen_range(-10.0..10.0) * 10f64.powi(rng.gen_range(-5..5)),
        })
        .collect();
    let path = std::env::temp_dir().join(format!("ofw-ratings-{}.csv", std::process::id()));
    write_ratings(std::fs::File::create(&path).unwrap(), &records).unwrap();
    let set = load_ratings(&path).unwrap();
    assert_eq!(set.records, records);
    assert_eq!(set.rows, records.iter().map(|r| r.user + 1).max().unwrap());
    assert_eq!(set.cols, records.iter().map(|r| r.item + 1).max().unwrap());
}

#[test]
fn file_examples() {
    let s = parse_ratings("1,2,5.0\n2,1,3.0".as_bytes()).unwrap();
    assert_eq!((s.rows, s.cols, s.records.len()), (2, 2, 2));
    assert_eq!(s.records[0], RatingRecord { user: 0, item: 1, rating: 5.0 });
    let s = parse_ratings("user,item,rating\n4,2,1.5\n".as_bytes()).unwrap();
    assert_eq!(s.records, vec![RatingRecord { user: 3, item: 1, rating: 1.5 }]);
}

#[test]
fn bad_lines_report_their_position() {
    for (text, line) in [("1,1,1\n2,0,4\n", 2), ("1,1,1\n2,2,2\n3,3,abc\n", 3), ("1,1,1,1\n", 1)] {
        match parse_ratings(text.as_bytes()) {
            Err(OfwError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
            other => panic!("{text:?}: {other:?}"),
        }
    }
    assert!(load_ratings(std::path::Path::new("/nonexistent/r.csv")).is_err());
}

#[test]
fn single_round_compare() {
    let records = [RatingRecord { user: 0, item: 2, rating: 1.0 }];
    let out = run_cf_compare(&BenchConfig::new(3, 4, 2.0, 1), &records).unwrap();
    let (ofw, ogd) = (out.ofw.unwrap(), out.ogd.unwrap());
    assert_eq!((ofw.len(), ogd.len()), (1, 1));
    assert_eq!(ofw.records[0].support_size, 1);
    assert!(matches!(run_cf_compare(&BenchConfig::new(3, 4, 2.0, 2), &records), Err(OfwError::Input(_))));
    let outside = [RatingRecord { user: 3, item: 0, rating: 1.0 }];
    assert!(run_cf_compare(&BenchConfig::new(3, 4, 2.0, 1), &outside).is_err());
}
