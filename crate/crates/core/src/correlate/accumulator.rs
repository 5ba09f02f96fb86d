use serde::{Deserialize, Serialize};

use crate::detect::{Calibration, PhotonHit};
use crate::error::{Error, Result};
use crate::geometry::RegionLabel;
use crate::matrix::Matrix;
use crate::spectrum::{FrequencyGrid, JointSpectrum, SpectralMarginal};

/// Mergeable coincidence histogram over (signal segment, idler segment).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelationAccumulator {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
    signal_hits: Vec<u64>,
    idler_hits: Vec<u64>,
    pub frames: u64,
    pub coincidence_frames: u64,
    pub discarded_multiplicity: u64,
}

impl CorrelationAccumulator {
    pub fn new(signal_segments: usize, idler_segments: usize) -> Self {
        Self {
            rows: signal_segments,
            cols: idler_segments,
            counts: vec![0; signal_segments * idler_segments],
            signal_hits: vec![0; signal_segments],
            idler_hits: vec![0; idler_segments],
            frames: 0,
            coincidence_frames: 0,
            discarded_multiplicity: 0,
        }
    }

    pub fn for_calibration(cal: &Calibration) -> Self {
        let (r, c) = cal.shape();
        Self::new(r, c)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn count(&self, s: usize, i: usize) -> u64 {
        self.counts[s * self.cols + i]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn signal_hits(&self) -> &[u64] {
        &self.signal_hits
    }

    pub fn idler_hits(&self) -> &[u64] {
        &self.idler_hits
    }

    pub fn total_counts(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Adds one frame's hits. A frame is a coincidence only with exactly one
    /// hit in each region; two or more in either region discard it.
    pub fn record_frame(&mut self, hits: &[PhotonHit]) -> Result<()> {
        for h in hits {
            let count = match h.region {
                RegionLabel::Signal => self.rows,
                RegionLabel::Idler => self.cols,
            };
            if h.segment >= count {
                return Err(Error::SegmentIndex {
                    index: h.segment,
                    count,
                });
            }
        }
        let (mut ns, mut ni) = (0usize, 0usize);
        let (mut s, mut i) = (0usize, 0usize);
        for h in hits {
            match h.region {
                RegionLabel::Signal => {
                    ns += 1;
                    s = h.segment;
                    self.signal_hits[h.segment] += 1;
                }
                RegionLabel::Idler => {
                    ni += 1;
                    i = h.segment;
                    self.idler_hits[h.segment] += 1;
                }
            }
        }
        self.frames += 1;
        if ns >= 2 || ni >= 2 {
            self.discarded_multiplicity += 1;
        } else if ns == 1 && ni == 1 {
            self.counts[s * self.cols + i] += 1;
            self.coincidence_frames += 1;
        }
        Ok(())
    }

    pub fn merge(mut self, other: &CorrelationAccumulator) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                found: other.shape(),
            });
        }
        let add = |a: &mut [u64], b: &[u64]| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        add(&mut self.counts, &other.counts);
        add(&mut self.signal_hits, &other.signal_hits);
        add(&mut self.idler_hits, &other.idler_hits);
        self.frames += other.frames;
        self.coincidence_frames += other.coincidence_frames;
        self.discarded_multiplicity += other.discarded_multiplicity;
        Ok(self)
    }

    pub fn report(&self) -> RateReport {
        let f = self.frames.max(1) as f64;
        RateReport {
            frames: self.frames,
            coincidence_frames: self.coincidence_frames,
            discarded_multiplicity: self.discarded_multiplicity,
            signal_hits: self.signal_hits.iter().sum(),
            idler_hits: self.idler_hits.iter().sum(),
            rate: self.coincidence_frames as f64 / f,
            rate_sigma: (self.coincidence_frames as f64).sqrt() / f,
        }
    }

    /// Normalized matrix, marginals and rates on the segment-center `grid`.
    pub fn finalize(&self, grid: &FrequencyGrid) -> Result<Finalized> {
        if grid.shape() != self.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                found: grid.shape(),
            });
        }
        if self.coincidence_frames == 0 {
            return Err(Error::EmptyResult(format!(
                "no coincidences in {} frames",
                self.frames
            )));
        }
        let values = Matrix::from_vec(
            self.rows,
            self.cols,
            self.counts.iter().map(|&c| c as f64).collect(),
        )?;
        let report = self.report();
        let matrix = CorrelationMatrix {
            spectrum: JointSpectrum::normalized(grid.clone(), values)?,
            coincidences: self.coincidence_frames,
            rate: report.rate,
        };
        let marginal = |axis: &[f64], hits: &[u64], label: RegionLabel| {
            if hits.iter().all(|&h| h == 0) {
                return Err(Error::EmptyResult(format!("no {label} hits")));
            }
            SpectralMarginal::new(axis.to_vec(), hits.iter().map(|&h| h as f64).collect())?
                .normalize()
        };
        Ok(Finalized {
            matrix,
            signal: marginal(grid.signal_nm(), &self.signal_hits, RegionLabel::Signal)?,
            idler: marginal(grid.idler_nm(), &self.idler_hits, RegionLabel::Idler)?,
            report,
        })
    }
}

/// A normalized coincidence matrix with its provenance counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub spectrum: JointSpectrum,
    pub coincidences: u64,
    /// Coincidence frames per processed frame.
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Finalized {
    pub matrix: CorrelationMatrix,
    pub signal: SpectralMarginal,
    pub idler: SpectralMarginal,
    pub report: RateReport,
}

/// Counting summary of a correlation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub frames: u64,
    pub coincidence_frames: u64,
    pub discarded_multiplicity: u64,
    pub signal_hits: u64,
    pub idler_hits: u64,
    pub rate: f64,
    /// Poisson standard error of `rate`.
    pub rate_sigma: f64,
}

impl RateReport {
    /// Readable summary followed by a `key=value` block.
    pub fn to_text(&self) -> String {
        let per = if self.coincidence_frames > 0 {
            format!("{:.1}", self.frames as f64 / self.coincidence_frames as f64)
        } else {
            "inf".into()
        };
        format!(
            "processed {} frames: {} coincidences ({} frames per coincidence), {} frames discarded for multiplicity\n\
             \n\
             frames={}\n\
             coincidence_frames={}\n\
             discarded_multiplicity={}\n\
             signal_hits={}\n\
             idler_hits={}\n\
             rate={:.6e}\n\
             rate_sigma={:.6e}\n",
            self.frames,
            self.coincidence_frames,
            per,
            self.discarded_multiplicity,
            self.frames,
            self.coincidence_frames,
            self.discarded_multiplicity,
            self.signal_hits,
            self.idler_hits,
            self.rate,
            self.rate_sigma
        )
    }

    /// Reads back the `key=value` block of [`RateReport::to_text`].
    pub fn parse(text: &str) -> Result<Self> {
        let kv: std::collections::HashMap<&str, &str> = text
            .lines()
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.trim(), v.trim()))
            .collect();
        let get = |k: &str| {
            kv.get(k)
                .copied()
                .ok_or_else(|| Error::Format(format!("rate report lacks `{k}`")))
        };
        let int = |k: &str| -> Result<u64> {
            get(k)?.parse().map_err(|_| Error::Format(format!("bad `{k}`")))
        };
        let float = |k: &str| -> Result<f64> {
            get(k)?.parse().map_err(|_| Error::Format(format!("bad `{k}`")))
        };
        Ok(Self {
            frames: int("frames")?,
            coincidence_frames: int("coincidence_frames")?,
            discarded_multiplicity: int("discarded_multiplicity")?,
            signal_hits: int("signal_hits")?,
            idler_hits: int("idler_hits")?,
            rate: float("rate")?,
            rate_sigma: float("rate_sigma")?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hit(region: RegionLabel, segment: usize) -> PhotonHit {
        PhotonHit {
            frame_index: 0,
            x: 0.0,
            y: 0.0,
            peak: 0,
            total: 0.0,
            area: 1,
            region,
            segment,
        }
    }

    use RegionLabel::{Idler as I, Signal as S};

    #[test]
    fn coincidence_rule() {
        let mut a = CorrelationAccumulator::new(24, 37);
        a.record_frame(&[hit(S, 3), hit(I, 7)]).unwrap();
        assert_eq!(a.count(3, 7), 1);
        assert_eq!(a.coincidence_frames, 1);

        a.record_frame(&[]).unwrap();
        assert_eq!((a.frames, a.coincidence_frames), (2, 1));

        a.record_frame(&[hit(S, 1), hit(S, 2), hit(I, 7)]).unwrap();
        assert_eq!(a.discarded_multiplicity, 1);
        assert_eq!(a.total_counts(), 1);
        assert_eq!(a.signal_hits()[1] + a.signal_hits()[2], 2);
        assert_eq!(a.idler_hits()[7], 2);

        a.record_frame(&[hit(I, 0)]).unwrap();
        assert_eq!((a.frames, a.coincidence_frames, a.discarded_multiplicity), (4, 1, 1));
    }

    #[test]
    fn out_of_range_segment_leaves_state_untouched() {
        let mut a = CorrelationAccumulator::new(2, 3);
        let before = a.clone();
        let err = a.record_frame(&[hit(S, 0), hit(I, 3)]).unwrap_err();
        assert!(matches!(err, Error::SegmentIndex { index: 3, count: 3 }));
        assert_eq!(a, before);
    }

    #[test]
    fn merge_identity_and_symmetry() {
        let mut a = CorrelationAccumulator::new(2, 3);
        a.record_frame(&[hit(S, 1), hit(I, 2)]).unwrap();
        let mut b = CorrelationAccumulator::new(2, 3);
        b.record_frame(&[hit(S, 0), hit(I, 0), hit(I, 1)]).unwrap();
        let empty = CorrelationAccumulator::new(2, 3);
        assert_eq!(a.clone().merge(&empty).unwrap(), a);
        assert_eq!(a.clone().merge(&b).unwrap(), b.clone().merge(&a).unwrap());
        assert!(a.merge(&CorrelationAccumulator::new(3, 2)).is_err());
    }

    #[test]
    fn finalize_delta_and_marginals() {
        let grid = FrequencyGrid::new(vec![779.0, 780.0], vec![779.0, 780.0, 781.0]).unwrap();
        let mut a = CorrelationAccumulator::new(2, 3);
        assert!(matches!(a.finalize(&grid), Err(Error::EmptyResult(_))));
        for _ in 0..5 {
            a.record_frame(&[hit(S, 1), hit(I, 2)]).unwrap();
        }
        let f = a.finalize(&grid).unwrap();
        assert_eq!(f.matrix.spectrum.get(1, 2), 1.0);
        assert_eq!(f.matrix.coincidences, 5);
        assert_eq!(f.signal.probabilities(), &[0.0, 1.0]);
        assert_eq!(f.idler.probabilities(), &[0.0, 0.0, 1.0]);
        assert_eq!(f.report.rate, 1.0);
    }

    #[test]
    fn report_roundtrip() {
        let mut a = CorrelationAccumulator::new(2, 3);
        a.record_frame(&[hit(S, 1), hit(I, 2)]).unwrap();
        a.record_frame(&[]).unwrap();
        let r = a.report();
        let text = r.to_text();
        assert!(text.contains("rate=5.000000e-1"));
        let back = RateReport::parse(&text).unwrap();
        assert_eq!(back.frames, 2);
        assert!((back.rate - 0.5).abs() < 1e-12);
    }
}
