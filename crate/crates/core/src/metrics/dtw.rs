use super::cepstrum::MelCepstra;
use super::MetricsError;

#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    /// Index pairs (ref, syn) from (0, 0) to (n-1, m-1).
    pub path: Vec<(usize, usize)>,
    /// Local distance at each path pair.
    pub distances: Vec<f64>,
    pub cost: f64,
}

/// Euclidean distance over c1..cD.
pub fn frame_distance(a: &[f64], b: &[f64]) -> f64 {
    a[1..]
        .iter()
        .zip(&b[1..])
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn in_band(i: usize, j: usize, n: usize, m: usize, band: Option<usize>) -> bool {
    let Some(w) = band else { return true };
    let expected = if m == 1 {
        0.0
    } else {
        j as f64 * (n - 1) as f64 / (m - 1) as f64
    };
    (i as f64 - expected).abs() <= w as f64
}

/// Minimal-cost monotone path over an `n` x `m` grid with steps (1,0),
/// (0,1), (1,1). Ties in the backtrace prefer the diagonal, then (i-1, j).
pub fn dtw<F>(n: usize, m: usize, band: Option<usize>, dist: F) -> Result<Alignment, MetricsError>
where
    F: Fn(usize, usize) -> f64,
{
    if n == 0 || m == 0 {
        return Err(MetricsError::EmptySequence);
    }
    let mut local = vec![f64::NAN; n * m];
    let mut acc = vec![f64::INFINITY; n * m];
    let at = |i: usize, j: usize| i * m + j;
    for i in 0..n {
        for j in 0..m {
            if !in_band(i, j, n, m, band) {
                continue;
            }
            let d = dist(i, j);
            local[at(i, j)] = d;
            let prev = if i == 0 && j == 0 {
                0.0
            } else {
                let mut best = f64::INFINITY;
                if i > 0 && j > 0 {
                    best = best.min(acc[at(i - 1, j - 1)]);
                }
                if i > 0 {
                    best = best.min(acc[at(i - 1, j)]);
                }
                if j > 0 {
                    best = best.min(acc[at(i, j - 1)]);
                }
                best
            };
            acc[at(i, j)] = prev + d;
        }
    }
    let cost = acc[at(n - 1, m - 1)];
    if !cost.is_finite() {
        return Err(MetricsError::BandTooNarrow);
    }

    let (mut i, mut j) = (n - 1, m - 1);
    let mut path = vec![(i, j)];
    while (i, j) != (0, 0) {
        let mut next = None;
        let mut best = f64::INFINITY;
        for (di, dj) in [(1, 1), (1, 0), (0, 1)] {
            if i < di || j < dj {
                continue;
            }
            let v = acc[at(i - di, j - dj)];
            if v < best {
                best = v;
                next = Some((i - di, j - dj));
            }
        }
        (i, j) = next.expect("finite cell has a finite predecessor");
        path.push((i, j));
    }
    path.reverse();
    let distances = path.iter().map(|&(i, j)| local[at(i, j)]).collect();
    Ok(Alignment {
        path,
        distances,
        cost,
    })
}

pub fn dtw_align(
    reference: &MelCepstra,
    synthesized: &MelCepstra,
    band: Option<usize>,
) -> Result<Alignment, MetricsError> {
    if reference.dims() != synthesized.dims() {
        return Err(MetricsError::DimensionMismatch);
    }
    let (r, s) = (reference.frames(), synthesized.frames());
    dtw(r.len(), s.len(), band, |i, j| frame_distance(&r[i], &s[j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::AudioSpec;

    fn seq(rows: &[[f64; 3]]) -> MelCepstra {
        MelCepstra::from_frames(rows.iter().map(|r| r.to_vec()).collect(), 10.0, AudioSpec::STUDIO)
            .unwrap()
    }

    #[test]
    fn identical_is_diagonal() {
        let a = seq(&[[0.0, 1.0, 2.0], [0.0, 3.0, 1.0], [5.0, -1.0, 0.0]]);
        let al = dtw_align(&a, &a, None).unwrap();
        assert_eq!(al.path, vec![(0, 0), (1, 1), (2, 2)]);
        assert_eq!(al.cost, 0.0);
    }

    #[test]
    fn repeated_frame_absorbed() {
        let x = [0.0, 1.0, 0.0];
        let y = [0.0, 0.0, 1.0];
        let al = dtw_align(&seq(&[x, y]), &seq(&[x, x, y]), None).unwrap();
        assert_eq!(al.path, vec![(0, 0), (0, 1), (1, 2)]);
        assert_eq!(al.cost, 0.0);
    }

    #[test]
    fn c0_is_ignored() {
        let al = dtw_align(&seq(&[[9.0, 1.0, 1.0]]), &seq(&[[-9.0, 1.0, 1.0]]), None).unwrap();
        assert_eq!(al.cost, 0.0);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(dtw(0, 3, None, |_, _| 0.0), Err(MetricsError::EmptySequence)));
    }

    #[test]
    fn band_restricts_path() {
        let free = dtw(6, 6, None, |i, j| if i == j { 5.0 } else { 1.0 }).unwrap();
        let banded = dtw(6, 6, Some(0), |i, j| if i == j { 5.0 } else { 1.0 }).unwrap();
        assert!(free.cost < banded.cost);
        assert_eq!(banded.path.len(), 6);
        assert!(matches!(dtw(6, 2, Some(0), |_, _| 1.0), Err(MetricsError::BandTooNarrow)));
    }
}
