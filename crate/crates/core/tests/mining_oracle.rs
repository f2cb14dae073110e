use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unitforge::mine::{filter_overlap, knn, margin_score, mine_pairs, simsearch_error_rate, Direction, Margin, MineParams, MinedPair, Side};
use unitforge::{EmbeddingMatrix, Segment};

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> EmbeddingMatrix<f32> {
    let data = (0..n * dim).map(|_| rng.random_range(-1.0f32..1.0)).collect();
    EmbeddingMatrix::new(n, dim, data).unwrap()
}

fn brute_force_knn(q: &EmbeddingMatrix<f32>, db: &EmbeddingMatrix<f32>, k: usize) -> Vec<Vec<(usize, f64)>> {
    let norm = |v: &[f32]| v.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt();
    q.iter_rows()
        .map(|a| {
            let mut all: Vec<(usize, f64)> = db
                .iter_rows()
                .enumerate()
                .map(|(j, b)| {
                    let d: f64 = a.iter().zip(b).map(|(&x, &y)| f64::from(x) * f64::from(y)).sum();
                    (j, (d / (norm(a) * norm(b))).clamp(-1.0, 1.0))
                })
                .collect();
            all.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap().then(x.0.cmp(&y.0)));
            all.truncate(k);
            all
        })
        .collect()
}

#[test]
fn knn_equals_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for inst in 0..50 {
        let n = rng.random_range(1..=500);
        let m = rng.random_range(1..=500);
        let dim = rng.random_range(2..12);
        let k = rng.random_range(1..10);
        let q = random_matrix(&mut rng, n, dim);
        let db = random_matrix(&mut rng, m, dim);
        let got = knn(&q, &db, k).unwrap();
        let want = brute_force_knn(&q, &db, k);
        for (g, w) in got.iter().zip(&want) {
            assert_eq!(&g.neighbors, w, "instance {inst}, query {}", g.query_index);
        }
    }
}

/// Two blocks of three: `v_i = e_i + 0.5 * 1_block(i)` in six dimensions, identical on both
/// sides. Same-block cosine is 1.75 / 2.75 = 7/11, cross-block cosine is 0.
fn block_fixture() -> EmbeddingMatrix<f64> {
    let rows: Vec<Vec<f64>> = (0..6)
        .map(|i| (0..6).map(|d| f64::from(u8::from(d == i)) + if d / 3 == i / 3 { 0.5 } else { 0.0 }).collect())
        .collect();
    EmbeddingMatrix::from_rows(&rows).unwrap()
}

#[test]
fn block_diagonal_margins() {
    let x = block_fixture();
    // k = 3: neighbours are self (1) and two block mates (7/11); mean 25/33.
    let nn = knn(&x, &x, 3).unwrap();
    for nl in &nn {
        assert!((nl.mean_cosine() - 25.0 / 33.0).abs() < 1e-12);
    }
    let diag = margin_score(1.0, &nn[0], &nn[0], Margin::Ratio).unwrap();
    assert!((diag - 33.0 / 25.0).abs() < 1e-12);
    let mate = margin_score(7.0 / 11.0, &nn[0], &nn[1], Margin::Ratio).unwrap();
    assert!((mate - 21.0 / 25.0).abs() < 1e-12);
    let dist = margin_score(1.0, &nn[0], &nn[0], Margin::Distance).unwrap();
    assert!((dist - 8.0 / 33.0).abs() < 1e-12);

    // k = 4 adds one cross-block neighbour at cosine 0; mean 25/44.
    let nn4 = knn(&x, &x, 4).unwrap();
    assert_eq!(nn4[0].neighbors[3], (3, 0.0));
    assert_eq!(nn4[4].neighbors[3], (0, 0.0));
    let diag4 = margin_score(1.0, &nn4[2], &nn4[2], Margin::Ratio).unwrap();
    assert!((diag4 - 44.0 / 25.0).abs() < 1e-12);

    let params = MineParams {
        k_nn: 3,
        ..MineParams::default()
    };
    let pairs = mine_pairs(&x, &x, &params).unwrap();
    assert_eq!(pairs.len(), 6);
    for p in &pairs {
        assert_eq!(p.src_id, p.tgt_id);
        assert!((p.score - 1.32).abs() < 1e-12);
    }
    let strict = MineParams {
        threshold: 1.33,
        ..params
    };
    assert!(mine_pairs(&x, &x, &strict).unwrap().is_empty());
}

#[test]
fn threshold_sweep_is_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let src = random_matrix(&mut rng, 300, 8);
    // Targets are noisy copies so that margins spread around 1.
    let noisy: Vec<f32> = src.data().iter().map(|&v| v + rng.random_range(-0.6f32..0.6)).collect();
    let tgt = EmbeddingMatrix::new(300, 8, noisy).unwrap();
    for direction in [Direction::Forward, Direction::Backward, Direction::Intersect] {
        let all = mine_pairs(
            &src,
            &tgt,
            &MineParams {
                direction,
                ..MineParams::default()
            },
        )
        .unwrap();
        let mut last = usize::MAX;
        let mut counts = Vec::new();
        for step in 0..=5 {
            let t = 1.0 + 0.02 * f64::from(step);
            let kept = mine_pairs(
                &src,
                &tgt,
                &MineParams {
                    threshold: t,
                    direction,
                    ..MineParams::default()
                },
            )
            .unwrap();
            assert_eq!(kept.len(), all.iter().filter(|p| p.score >= t).count());
            assert!(kept.len() <= last);
            last = kept.len();
            counts.push(kept.len());
        }
        assert!(counts[0] > counts[5], "{direction:?}: {counts:?}");
    }
}

fn inter(a: &Segment, b: &Segment) -> f64 {
    (a.end_s.min(b.end_s) - a.start_s.max(b.start_s)).max(0.0)
}

#[test]
fn overlap_audit_on_random_layouts() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for layout in 0..100 {
        let n = rng.random_range(1..80);
        let audios = rng.random_range(1..4);
        let pairs: Vec<MinedPair> = (0..n)
            .map(|i| {
                let start = rng.random_range(0.0..60.0);
                let len = rng.random_range(0.5..12.0);
                let mut p = MinedPair::new(format!("s{i}"), format!("t{i}"), rng.random_range(0.5..2.0));
                p.src_segment = Some(Segment::new(format!("a{}", rng.random_range(0..audios)), start, start + len).unwrap());
                p
            })
            .collect();
        let kept = filter_overlap(&pairs, 0.2, Side::Src).unwrap();
        assert!(!kept.is_empty());
        for (i, a) in kept.iter().enumerate() {
            for b in &kept[i + 1..] {
                let (sa, sb) = (a.src_segment.as_ref().unwrap(), b.src_segment.as_ref().unwrap());
                if sa.audio_id == sb.audio_id {
                    let shorter = (sa.end_s - sa.start_s).min(sb.end_s - sb.start_s);
                    assert!(inter(sa, sb) / shorter <= 0.2, "layout {layout}");
                }
            }
        }
        // Every rejected pair collides with some kept pair that outranks it.
        for p in &pairs {
            if kept.iter().any(|k| k.src_id == p.src_id) {
                continue;
            }
            let sp = p.src_segment.as_ref().unwrap();
            assert!(kept.iter().any(|k| {
                let sk = k.src_segment.as_ref().unwrap();
                sk.audio_id == sp.audio_id
                    && inter(sk, sp) / (sk.end_s - sk.start_s).min(sp.end_s - sp.start_s) > 0.2
                    && k.score >= p.score
            }));
        }
    }
}

#[test]
fn overlap_boundary() {
    let seg = |s, e| Segment::new("x", s, e).unwrap();
    let mk = |id: &str, score, s| {
        let mut p = MinedPair::new(id, id, score);
        p.src_segment = Some(s);
        p
    };
    let two = [mk("a", 1.0, seg(0.0, 10.0)), mk("b", 0.9, seg(8.0, 18.0))];
    assert_eq!(filter_overlap(&two, 0.2, Side::Src).unwrap().len(), 2);
    let three = [mk("a", 1.0, seg(0.0, 10.0)), mk("b", 0.9, seg(7.0, 17.0))];
    let kept = filter_overlap(&three, 0.2, Side::Src).unwrap();
    assert_eq!(kept.len(), 1);
    assert_eq!(kept[0].src_id, "a");
}

fn one_hot(n: usize, hot: &[usize], prefix: &str) -> EmbeddingMatrix<f64> {
    let rows: Vec<Vec<f64>> = hot.iter().map(|&h| (0..n).map(|d| f64::from(u8::from(d == h))).collect()).collect();
    EmbeddingMatrix::from_rows(&rows)
        .unwrap()
        .with_ids((0..hot.len()).map(|i| format!("{prefix}{i}")).collect())
        .unwrap()
}

fn gold(n: usize) -> HashMap<String, String> {
    (0..n).map(|i| (format!("a{i}"), format!("t{i}"))).collect()
}

#[test]
fn simsearch_hand_scored_fixture() {
    // Audio 3 and 7 carry each other's content: both are wrongly matched, 2 of 10.
    let audio = one_hot(10, &[0, 1, 2, 7, 4, 5, 6, 3, 8, 9], "a");
    let text = one_hot(10, &(0..10).collect::<Vec<_>>(), "t");
    let r = simsearch_error_rate(&audio, &text, &gold(10), 4, Margin::Ratio).unwrap();
    assert_eq!((r.total, r.errors), (10, 2));
    assert_eq!(r.formatted(), "20.00%");
    assert_eq!(
        r.mismatches,
        vec![
            ("a3".to_string(), "t7".to_string(), "t3".to_string()),
            ("a7".to_string(), "t3".to_string(), "t7".to_string())
        ]
    );
}

#[test]
fn simsearch_separable_is_error_free() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let n = 60;
    let text = random_matrix(&mut rng, n, 32).with_ids((0..n).map(|i| format!("t{i}")).collect()).unwrap();
    let audio_data: Vec<f32> = text.data().iter().map(|&v| v + rng.random_range(-0.05f32..0.05)).collect();
    let audio = EmbeddingMatrix::new(n, 32, audio_data)
        .unwrap()
        .with_ids((0..n).map(|i| format!("a{i}")).collect())
        .unwrap();
    let r = simsearch_error_rate(&audio, &text, &gold(n), 4, Margin::Ratio).unwrap();
    assert_eq!(r.errors, 0);
    assert_eq!(r.formatted(), "0.00%");
}
