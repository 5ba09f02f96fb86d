use cospli::detect::{
    accumulate, calibrate_regions, covered_fraction, Calibration, DetectionParams, Detector,
    PhotonHit,
};
use cospli::geometry::DispersionAxis;
use cospli::io::{RunConfig, SpectrumKind};
use cospli::pipeline::accumulate_simulated;
use cospli::sim::{render_hit, Frame, GateMode, SpatialMap};
use proptest::prelude::*;
use rayon::prelude::*;

fn cal() -> Calibration {
    Calibration::from_map(&SpatialMap::default(), 10, 400, 96).unwrap()
}

fn frame_with(spots: &[(f64, f64, f64)], noise: &[u16]) -> Frame {
    let mut f = Frame::new(3, 400, 96, GateMode::TimeDependent);
    for (p, n) in f.pixels.iter_mut().zip(noise.iter().cycle()) {
        *p = 100 + n;
    }
    for &(x, y, a) in spots {
        render_hit(&mut f, x, y, a, 1.5);
    }
    f
}

/// Components by repeated label relaxation over every pixel, without a stack.
fn oracle(frame: &Frame, params: &DetectionParams, cal: &Calibration) -> Vec<(u64, u64, usize)> {
    let (ib, _) = cospli::detect::background_stats(frame);
    let t = params.threshold(frame);
    let (w, h) = (frame.width, frame.height);
    let above = |x: usize, y: usize| frame.get(x, y) as f64 > t;
    let mut label: Vec<usize> = (0..w * h).collect();
    loop {
        let mut changed = false;
        for y in 0..h {
            for x in 0..w {
                if !above(x, y) {
                    continue;
                }
                for (dx, dy) in [(-1i64, -1i64), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)] {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let (nx, ny) = (nx as usize, ny as usize);
                    if above(nx, ny) && label[ny * w + nx] < label[y * w + x] {
                        label[y * w + x] = label[ny * w + nx];
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (p, &l) in label.iter().enumerate() {
        if above(p % w, p / w) {
            groups.entry(l).or_default().push(p);
        }
    }
    let mut out = Vec::new();
    for pix in groups.values() {
        if pix.len() < params.min_area || pix.len() > params.max_area {
            continue;
        }
        let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
        for &p in pix {
            let v = frame.pixels[p] as f64 - ib;
            sx += v * (p % w) as f64;
            sy += v * (p / w) as f64;
            sw += v;
        }
        let (x, y) = (sx / sw, sy / sw);
        if let Some((_, seg)) = cal.locate(x, y) {
            out.push(((x * 1e6).round() as u64, (y * 1e6).round() as u64, seg));
        }
    }
    out.sort();
    out
}

fn keyed(hits: &[PhotonHit]) -> Vec<(u64, u64, usize)> {
    let mut v: Vec<_> = hits
        .iter()
        .map(|h| ((h.x * 1e6).round() as u64, (h.y * 1e6).round() as u64, h.segment))
        .collect();
    v.sort();
    v
}

fn spot_strategy() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((5.0f64..395.0, 5.0f64..91.0, 50.0f64..3000.0), 0..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn matches_pixel_scan_oracle(spots in spot_strategy(), noise in prop::collection::vec(0u16..6, 1..64)) {
        let f = frame_with(&spots, &noise);
        let c = cal();
        let params = DetectionParams::default();
        let hits = Detector::new(&c, params).detect(&f);
        prop_assert_eq!(keyed(&hits), oracle(&f, &params, &c));
    }

    #[test]
    fn detection_is_pure(spots in spot_strategy(), noise in prop::collection::vec(0u16..6, 1..64)) {
        let c = cal();
        let params = DetectionParams::default();
        let frames: Vec<Frame> = (0..6).map(|k| {
            let mut f = frame_with(&spots, &noise);
            f.index = k;
            f
        }).collect();
        let mut det = Detector::new(&c, params);
        let seq: Vec<Vec<PhotonHit>> = frames.iter().map(|f| det.detect(f)).collect();
        let par: Vec<Vec<PhotonHit>> = frames.par_iter().rev().map(|f| Detector::new(&c, params).detect(f)).collect();
        let par: Vec<Vec<PhotonHit>> = par.into_iter().rev().collect();
        prop_assert_eq!(&seq, &par);
        for hits in &seq {
            for h in hits {
                let s = c.segmentation(h.region);
                prop_assert!(h.segment < s.count);
                prop_assert!(s.region.bbox.contains_point(h.x, h.y));
            }
        }
    }

    /// Isolated single-peaked spots: a higher gap can only remove hits.
    #[test]
    fn raising_the_gap_never_adds_hits(
        xs in prop::collection::btree_set(0usize..19, 0..6),
        amps in prop::collection::vec(100.0f64..4000.0, 6),
        g1 in 1.0f64..40.0, dg in 0.0f64..40.0,
    ) {
        let spots: Vec<(f64, f64, f64)> = xs.iter().zip(&amps)
            .map(|(&k, &a)| (20.0 + 19.0 * k as f64, if k % 2 == 0 { 24.3 } else { 71.6 }, a))
            .collect();
        let f = frame_with(&spots, &[0]);
        let c = cal();
        let p1 = DetectionParams { gap_counts: Some(g1), max_area: usize::MAX, ..Default::default() };
        let p2 = DetectionParams { gap_counts: Some(g1 + dg), ..p1 };
        let n1 = Detector::new(&c, p1).detect(&f).len();
        let n2 = Detector::new(&c, p2).detect(&f).len();
        prop_assert!(n2 <= n1, "{} > {}", n2, n1);
    }
}

/// Bright simulated spots on readout noise without dark events: every photon
/// is found, within half a pixel.
#[test]
fn recall_on_noisy_simulation() {
    let mut cfg = RunConfig::default();
    cfg.source.excitation_probability = 1.0;
    cfg.source.transmission = 1.0;
    cfg.camera.quantum_efficiency = 1.0;
    cfg.camera.dark_rate = 0.0;
    cfg.camera.gain = 1200.0;
    cfg.camera.gain_sigma = 0.0;
    let sim = cfg.simulator(SpectrumKind::Dependent).unwrap();
    let c = cfg.calibration().unwrap();
    let mut det = Detector::new(&c, cfg.detection);
    let mut checked = 0;
    for k in 0..300 {
        let sf = sim.frame_detailed(21, k);
        let (ib, sb) = cospli::detect::background_stats(&sf.frame);
        let t = ib + cfg.detection.gap(sb);
        let hits = det.detect(&sf.frame);
        for p in &sf.photons {
            let peak = sf.frame.get(p.x.round() as usize, p.y.round() as usize) as f64;
            assert!(peak >= t + 6.0 * sb);
            let d = hits
                .iter()
                .map(|h| (h.x - p.x).hypot(h.y - p.y))
                .fold(f64::INFINITY, f64::min);
            assert!(d <= 0.5, "frame {k}: nearest hit {d} px away");
            checked += 1;
        }
    }
    assert_eq!(checked, 600);
}

/// An accumulation of simulated frames shows the two configured bands and
/// calibrates to boxes around them.
#[test]
fn accumulated_simulation_calibrates_to_configured_bands() {
    let mut cfg = RunConfig::default();
    cfg.source.transmission = 1.0;
    cfg.camera.quantum_efficiency = 1.0;
    let sim = cfg.simulator(SpectrumKind::Dependent).unwrap();
    let acc = accumulate_simulated(&sim, 4, 0..10_000).unwrap();
    let mean = acc.mean();
    let rows = mean.row_sums();
    let background = rows[0];
    let peak_in = |a: usize, b: usize| (a..b).max_by(|&i, &j| rows[i].total_cmp(&rows[j])).unwrap();
    assert_eq!(peak_in(0, 48), 24);
    assert_eq!(peak_in(48, 96), 72);
    assert!(rows[24] - background > 10.0, "{} vs {background}", rows[24]);

    let (s, i) = calibrate_regions(&acc, DispersionAxis::X).unwrap();
    let center = |y0: usize, y1: usize| (y0 + y1 - 1) as f64 / 2.0;
    assert!((center(s.bbox.y0, s.bbox.y1) - 24.0).abs() <= 1.0, "{:?}", s.bbox);
    assert!((center(i.bbox.y0, i.bbox.y1) - 72.0).abs() <= 1.0, "{:?}", i.bbox);
    assert!(covered_fraction(&acc, &[s.bbox, i.bbox]) >= 0.99);
    assert!(!s.bbox.intersects(&i.bbox));
    // The detected boxes segment like any other.
    let auto = Calibration::from_regions(&cfg.map, (s, i), 10, 400, 96).unwrap();
    assert!(auto.signal.count >= 2 && auto.idler.count >= 2);
}

#[test]
fn partitioned_accumulation_is_exact() {
    let cfg = RunConfig::default();
    let sim = cfg.simulator(SpectrumKind::Dependent).unwrap();
    let frames: Vec<Frame> = (0..40).map(|k| sim.frame(6, k)).collect();
    let whole = accumulate(&frames).unwrap();
    let mut parts = accumulate(&frames[..7]).unwrap();
    for chunk in frames[7..].chunks(11) {
        parts = parts.merge(&accumulate(chunk).unwrap()).unwrap();
    }
    assert_eq!(whole, parts);
}
