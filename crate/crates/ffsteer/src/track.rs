//! Closed race track as an arc-length-parameterized centerline.
//!
//! A [`Track`] is a list of uniformly spaced [`TrackPoint`]s with position,
//! heading and curvature. Vehicle poses are projected onto the centerline to
//! obtain progress `s`, signed lateral error (positive left of the path
//! tangent) and heading error.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{BufRead, Write};
use std::path::Path;

/// One centerline sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackPoint {
    /// Arc length from the start line [m]. Strictly increasing, first point 0.
    pub s: f64,
    pub x: f64,
    pub y: f64,
    /// Path tangent heading [rad], continuous (unwrapped) along the list.
    pub heading: f64,
    /// Signed curvature [1/m], positive turning left.
    pub curvature: f64,
}

/// Geometric segment primitive used by the synthetic track builder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SegmentKind {
    Straight,
    /// Constant curvature [1/m].
    Arc { curvature: f64 },
    /// Curvature linear in arc length from `k_start` to `k_end`.
    Clothoid { k_start: f64, k_end: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub length: f64,
}

impl Segment {
    pub fn straight(length: f64) -> Self {
        Segment {
            kind: SegmentKind::Straight,
            length,
        }
    }

    pub fn arc(curvature: f64, length: f64) -> Self {
        Segment {
            kind: SegmentKind::Arc { curvature },
            length,
        }
    }

    /// Arc subtending `angle` rad at constant `curvature`.
    pub fn arc_by_angle(curvature: f64, angle: f64) -> Self {
        Segment::arc(curvature, (angle / curvature).abs())
    }

    pub fn clothoid(k_start: f64, k_end: f64, length: f64) -> Self {
        Segment {
            kind: SegmentKind::Clothoid { k_start, k_end },
            length,
        }
    }

    fn curvature_at(&self, s: f64) -> f64 {
        match self.kind {
            SegmentKind::Straight => 0.0,
            SegmentKind::Arc { curvature } => curvature,
            SegmentKind::Clothoid { k_start, k_end } => {
                k_start + (k_end - k_start) * (s / self.length)
            }
        }
    }
}

/// Build spec for a synthetic track.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackSpec {
    pub segments: Vec<Segment>,
    /// Target resampling spacing [m].
    pub spacing: f64,
    /// Request a closed track (closure is checked, not assumed).
    pub closed: bool,
}

impl TrackSpec {
    /// The default benchmark layout: point-symmetric mix of two hairpins
    /// (clothoid-arc-clothoid, apex curvature 0.05 1/m), two fast sweepers
    /// (0.01 1/m), two medium corners (0.02 1/m) and straights.
    ///
    /// Each half turns the heading by exactly pi, and the second half repeats
    /// the first, so the layout closes by point symmetry.
    pub fn default_benchmark() -> Self {
        let half = vec![
            Segment::straight(80.0),
            Segment::arc_by_angle(0.01, PI / 2.0),
            Segment::straight(40.0),
            Segment::clothoid(0.0, 0.05, 20.0),
            Segment::arc_by_angle(0.05, PI - 1.0),
            Segment::clothoid(0.05, 0.0, 20.0),
            Segment::straight(40.0),
            Segment::arc_by_angle(-0.02, PI / 2.0),
            Segment::straight(60.0),
        ];
        let mut segments = half.clone();
        segments.extend(half);
        TrackSpec {
            segments,
            spacing: 1.0,
            closed: true,
        }
    }
}

/// Arc-length-parameterized centerline. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Track {
    points: Vec<TrackPoint>,
    closed: bool,
    total_length: f64,
    spacing: f64,
}

/// Result of projecting a vehicle pose onto the track.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    /// Arc length of the nearest centerline point [m].
    pub s: f64,
    /// Signed distance from the centerline, positive left of the path tangent [m].
    pub lateral_error: f64,
    /// Vehicle yaw minus path heading, wrapped to (-pi, pi] [rad].
    pub heading_error: f64,
}

/// Wrap an angle to (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a % (2.0 * PI);
    if r <= -PI {
        r += 2.0 * PI;
    } else if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Closure residual limit for accepting a track as closed [m].
pub const CLOSURE_LIMIT: f64 = 0.5;
/// Half-width of the local projection window around the hint [m].
const PROJECT_WINDOW: f64 = 20.0;
/// Beyond this distance from the centerline a pose is off-track [m].
const OFF_TRACK_DIST: f64 = 50.0;
/// Clothoid integration substep [m].
const CLOTHOID_STEP: f64 = 0.1;

/// Build a track from a segment list. Segments are integrated exactly
/// (straights, arcs) or by RK4 on (x, y, heading) with curvature linear in s
/// (clothoids), then resampled uniformly.
pub fn build_synthetic_track(spec: &TrackSpec) -> Result<Track> {
    if spec.segments.is_empty() {
        return Err(Error::InvalidInput("empty segment list".into()));
    }
    for seg in &spec.segments {
        if !(seg.length > 0.0) || !seg.length.is_finite() {
            return Err(Error::InvalidInput(format!(
                "segment length {} must be > 0",
                seg.length
            )));
        }
    }
    if !(spec.spacing > 0.0) {
        return Err(Error::InvalidInput("spacing must be > 0".into()));
    }

    // Dense path: segment endpoints plus fine substeps.
    let mut xs = vec![0.0f64];
    let mut ys = vec![0.0f64];
    let mut hs = vec![0.0f64];
    let mut ss = vec![0.0f64];
    let mut ks = vec![spec.segments[0].curvature_at(0.0)];

    let (mut x, mut y, mut h, mut s_acc) = (0.0, 0.0, 0.0, 0.0);
    for seg in &spec.segments {
        let n_sub = (seg.length / CLOTHOID_STEP).ceil().max(1.0) as usize;
        let ds = seg.length / n_sub as f64;
        let mut s_local = 0.0;
        for _ in 0..n_sub {
            match seg.kind {
                SegmentKind::Straight => {
                    x += ds * h.cos();
                    y += ds * h.sin();
                }
                SegmentKind::Arc { curvature } if curvature.abs() < 1e-12 => {
                    x += ds * h.cos();
                    y += ds * h.sin();
                }
                SegmentKind::Arc { curvature } => {
                    // Exact circular step.
                    let h1 = h + curvature * ds;
                    x += (h1.sin() - h.sin()) / curvature;
                    y += (h.cos() - h1.cos()) / curvature;
                    h = h1;
                }
                SegmentKind::Clothoid { .. } => {
                    // RK4 on (x, y, heading) with curvature linear in s.
                    let k_of = |sl: f64| seg.curvature_at(sl);
                    let f = |hh: f64, sl: f64| (hh.cos(), hh.sin(), k_of(sl));
                    let (k1x, k1y, k1h) = f(h, s_local);
                    let (k2x, k2y, k2h) = f(h + 0.5 * ds * k1h, s_local + 0.5 * ds);
                    let (k3x, k3y, k3h) = f(h + 0.5 * ds * k2h, s_local + 0.5 * ds);
                    let (k4x, k4y, k4h) = f(h + ds * k3h, s_local + ds);
                    x += ds / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
                    y += ds / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
                    h += ds / 6.0 * (k1h + 2.0 * k2h + 2.0 * k3h + k4h);
                }
            }
            if let SegmentKind::Straight | SegmentKind::Arc { .. } = seg.kind {
                if let SegmentKind::Straight = seg.kind {
                    // heading unchanged
                } else if let SegmentKind::Arc { curvature } = seg.kind {
                    if curvature.abs() < 1e-12 {
                        // treated as straight above; heading already advanced exactly
                    }
                }
            }
            s_local += ds;
            s_acc += ds;
            xs.push(x);
            ys.push(y);
            hs.push(h);
            ss.push(s_acc);
            ks.push(seg.curvature_at(s_local.min(seg.length)));
        }
    }

    let total = s_acc;
    let residual_vec = (xs[0] - x, ys[0] - y);
    let residual = (residual_vec.0.powi(2) + residual_vec.1.powi(2)).sqrt();
    let closed = if spec.closed {
        if residual >= CLOSURE_LIMIT {
            return Err(Error::NonClosure {
                residual,
                limit: CLOSURE_LIMIT,
            });
        }
        true
    } else {
        false
    };

    // Heading residual: difference from the nearest full-turn multiple.
    let dh_total = h - hs[0];
    let h_target = if closed {
        2.0 * PI * (dh_total / (2.0 * PI)).round()
    } else {
        dh_total
    };
    let h_residual = h_target - dh_total;

    if closed {
        // Distribute the position and heading residuals linearly in s so the
        // closure invariants hold exactly; curvature shifts by a constant.
        let n = xs.len();
        for i in 0..n {
            let f = ss[i] / total;
            xs[i] += f * residual_vec.0;
            ys[i] += f * residual_vec.1;
            hs[i] += f * h_residual;
            ks[i] += h_residual / total;
        }
    }

    // Uniform resampling.
    let n_pts = (total / spec.spacing).round().max(4.0) as usize;
    let spacing = total / n_pts as f64;
    let n_samples = if closed { n_pts } else { n_pts + 1 };
    let mut points = Vec::with_capacity(n_samples);
    let mut j = 0usize;
    for i in 0..n_samples {
        let s = i as f64 * spacing;
        while j + 1 < ss.len() && ss[j + 1] < s {
            j += 1;
        }
        let j1 = (j + 1).min(ss.len() - 1);
        let span = (ss[j1] - ss[j]).max(1e-12);
        let t = ((s - ss[j]) / span).clamp(0.0, 1.0);
        points.push(TrackPoint {
            s,
            x: xs[j] + t * (xs[j1] - xs[j]),
            y: ys[j] + t * (ys[j1] - ys[j]),
            heading: hs[j] + t * (hs[j1] - hs[j]),
            curvature: ks[j] + t * (ks[j1] - ks[j]),
        });
    }

    Ok(Track {
        points,
        closed,
        total_length: total,
        spacing,
    })
}

impl Track {
    pub fn points(&self) -> &[TrackPoint] {
        &self.points
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Normalize s into [0, total_length) for closed tracks.
    pub fn wrap_s(&self, s: f64) -> f64 {
        if self.closed {
            s.rem_euclid(self.total_length)
        } else {
            s.clamp(0.0, self.total_length)
        }
    }

    fn index_before(&self, s: f64) -> usize {
        let i = (s / self.spacing).floor() as isize;
        i.clamp(0, self.points.len() as isize - 1) as usize
    }

    fn point_after(&self, i: usize) -> TrackPoint {
        if i + 1 < self.points.len() {
            self.points[i + 1]
        } else if self.closed {
            // wrap: first point shifted by a lap
            let mut p = self.points[0];
            p.s += self.total_length;
            p.heading += self.heading_turns();
            p
        } else {
            self.points[i]
        }
    }

    /// Total signed heading change over one lap (±2π for closed tracks).
    fn heading_turns(&self) -> f64 {
        let first = self.points[0].heading;
        let last = self.points[self.points.len() - 1].heading;
        let per_step = (last - first) / (self.points.len() - 1).max(1) as f64;
        2.0 * PI * ((last - first + per_step) / (2.0 * PI)).round()
    }

    /// Interpolated centerline sample at arc length `s` (wrapped if closed).
    pub fn sample(&self, s: f64) -> TrackPoint {
        let s = self.wrap_s(s);
        let i = self.index_before(s);
        let a = self.points[i];
        let b = self.point_after(i);
        let span = (b.s - a.s).max(1e-12);
        let t = ((s - a.s) / span).clamp(0.0, 1.0);
        TrackPoint {
            s,
            x: a.x + t * (b.x - a.x),
            y: a.y + t * (b.y - a.y),
            heading: a.heading + t * (b.heading - a.heading),
            curvature: a.curvature + t * (b.curvature - a.curvature),
        }
    }

    /// Project a vehicle pose onto the centerline.
    ///
    /// The search is windowed ±20 m around `s_hint`; if the best local match
    /// is farther than 50 m from the pose a global search is tried before
    /// giving up with [`Error::OffTrack`].
    pub fn project(&self, x: f64, y: f64, yaw: f64, s_hint: f64) -> Result<Projection> {
        let hint = self.wrap_s(s_hint);
        let w = (PROJECT_WINDOW / self.spacing).ceil() as isize;
        let i0 = self.index_before(hint) as isize;
        let n = self.points.len() as isize;

        let candidates = (-w..=w).map(|d| {
            let i = if self.closed {
                (i0 + d).rem_euclid(n)
            } else {
                (i0 + d).clamp(0, n - 1)
            } as usize;
            i
        });
        let best = self.nearest_among(candidates, x, y);
        let best = match best {
            Some((i, d2)) if d2.sqrt() <= OFF_TRACK_DIST => i,
            _ => {
                // Global fallback.
                match self.nearest_among(0..self.points.len(), x, y) {
                    Some((i, d2)) if d2.sqrt() <= OFF_TRACK_DIST => i,
                    _ => {
                        return Err(Error::OffTrack {
                            x,
                            y,
                            max_dist: OFF_TRACK_DIST,
                        })
                    }
                }
            }
        };

        // Refine on the two segments adjacent to the best sample.
        let mut result: Option<(f64, f64, f64, usize, f64)> = None; // (d2, s, t, i, _)
        let prev = if best == 0 {
            if self.closed {
                self.points.len() - 1
            } else {
                0
            }
        } else {
            best - 1
        };
        for i in [prev, best] {
            let a = self.points[i];
            let b = self.point_after(i);
            let (dx, dy) = (b.x - a.x, b.y - a.y);
            let len2 = dx * dx + dy * dy;
            if len2 < 1e-18 {
                continue;
            }
            let t = (((x - a.x) * dx + (y - a.y) * dy) / len2).clamp(0.0, 1.0);
            let (px, py) = (a.x + t * dx, a.y + t * dy);
            let d2 = (x - px).powi(2) + (y - py).powi(2);
            if result.is_none() || d2 < result.unwrap().0 {
                result = Some((d2, a.s + t * (b.s - a.s), t, i, 0.0));
            }
        }
        let (d2, s_raw, t, i, _) = result.ok_or(Error::OffTrack {
            x,
            y,
            max_dist: OFF_TRACK_DIST,
        })?;
        let a = self.points[i];
        let b = self.point_after(i);
        let heading = a.heading + t * (b.heading - a.heading);
        let (tx, ty) = (heading.cos(), heading.sin());
        let s = self.wrap_s(s_raw);
        let (px, py) = {
            let span = (b.s - a.s).max(1e-12);
            let tt = ((s_raw - a.s) / span).clamp(0.0, 1.0);
            (a.x + tt * (b.x - a.x), a.y + tt * (b.y - a.y))
        };
        // Signed: positive when the pose is left of the tangent.
        let cross = tx * (y - py) - ty * (x - px);
        let lateral_error = cross.signum() * d2.sqrt();
        let lateral_error = if d2 == 0.0 { 0.0 } else { lateral_error };
        Ok(Projection {
            s,
            lateral_error,
            heading_error: wrap_angle(yaw - heading),
        })
    }

    fn nearest_among<I: IntoIterator<Item = usize>>(
        &self,
        idx: I,
        x: f64,
        y: f64,
    ) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for i in idx {
            let p = &self.points[i];
            let d2 = (p.x - x).powi(2) + (p.y - y).powi(2);
            if best.is_none() || d2 < best.unwrap().1 {
                best = Some((i, d2));
            }
        }
        best
    }

    /// Write the centerline as CSV with header `s,x,y,heading,curvature`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "s,x,y,heading,curvature")?;
        for p in &self.points {
            writeln!(w, "{},{},{},{},{}", p.s, p.x, p.y, p.heading, p.curvature)?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    /// Read a centerline CSV. Columns `s,x,y` are required; `heading` and
    /// `curvature` are recomputed from positions when absent.
    pub fn from_csv<R: BufRead>(r: R, closed: bool) -> Result<Track> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse {
                path: "<csv>".into(),
                what: "empty file".into(),
            })?
            .map_err(Error::Io)?;
        let cols: Vec<&str> = header.trim().split(',').map(|c| c.trim()).collect();
        let find = |name: &str| cols.iter().position(|c| *c == name);
        let (ci_s, ci_x, ci_y) = match (find("s"), find("x"), find("y")) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => {
                return Err(Error::Parse {
                    path: "<csv>".into(),
                    what: "header must contain s,x,y".into(),
                })
            }
        };
        let ci_h = find("heading");
        let ci_k = find("curvature");

        let mut rows: Vec<(f64, f64, f64, Option<f64>, Option<f64>)> = Vec::new();
        for (ln, line) in lines.enumerate() {
            let line = line.map_err(Error::Io)?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            let get = |i: usize| -> Result<f64> {
                fields
                    .get(i)
                    .and_then(|v| v.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::Parse {
                        path: "<csv>".into(),
                        what: format!("bad field {} on data line {}", i, ln + 1),
                    })
            };
            rows.push((
                get(ci_s)?,
                get(ci_x)?,
                get(ci_y)?,
                ci_h.map(get).transpose()?,
                ci_k.map(get).transpose()?,
            ));
        }
        if rows.len() < 4 {
            return Err(Error::Parse {
                path: "<csv>".into(),
                what: "need at least 4 points".into(),
            });
        }
        for w in rows.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Parse {
                    path: "<csv>".into(),
                    what: "s must be strictly increasing".into(),
                });
            }
        }

        let n = rows.len();
        let total = if closed {
            // assume uniform spacing continues past the last point
            rows[n - 1].0 + (rows[n - 1].0 - rows[n - 2].0)
        } else {
            rows[n - 1].0
        };

        // Heading from positions if absent (unwrapped).
        let headings: Vec<f64> = if rows.iter().all(|r| r.3.is_some()) {
            rows.iter().map(|r| r.3.unwrap()).collect()
        } else {
            let mut hs = Vec::with_capacity(n);
            let mut prev = 0.0f64;
            for i in 0..n {
                let (j0, j1) = if i + 1 < n { (i, i + 1) } else { (i - 1, i) };
                let raw = (rows[j1].2 - rows[j0].2).atan2(rows[j1].1 - rows[j0].1);
                let h = if i == 0 {
                    raw
                } else {
                    prev + wrap_angle(raw - prev)
                };
                hs.push(h);
                prev = h;
            }
            hs
        };
        let curvatures: Vec<f64> = if rows.iter().all(|r| r.4.is_some()) {
            rows.iter().map(|r| r.4.unwrap()).collect()
        } else {
            (0..n)
                .map(|i| {
                    let (j0, j1) = if i == 0 {
                        (0, 1)
                    } else if i + 1 < n {
                        (i - 1, i + 1)
                    } else {
                        (n - 2, n - 1)
                    };
                    let ds = rows[j1].0 - rows[j0].0;
                    wrap_angle(headings[j1] - headings[j0]) / ds.max(1e-9)
                })
                .collect()
        };

        let points: Vec<TrackPoint> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| TrackPoint {
                s: r.0,
                x: r.1,
                y: r.2,
                heading: headings[i],
                curvature: curvatures[i],
            })
            .collect();
        let spacing = total / n as f64;
        Ok(Track {
            points,
            closed,
            total_length: total,
            spacing,
        })
    }

    pub fn load_csv(path: &Path, closed: bool) -> Result<Track> {
        let f = std::fs::File::open(path)?;
        Self::from_csv(std::io::BufReader::new(f), closed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn circle(radius: f64) -> Track {
        let spec = TrackSpec {
            segments: vec![Segment::arc(1.0 / radius, 2.0 * PI * radius)],
            spacing: 1.0,
            closed: true,
        };
        build_synthetic_track(&spec).unwrap()
    }

    #[test]
    fn single_arc_closes_into_circle() {
        let t = circle(50.0);
        assert!(t.closed());
        assert_relative_eq!(t.total_length(), 2.0 * PI * 50.0, epsilon = 1e-6);
        for p in t.points() {
            assert_relative_eq!(p.curvature, 0.02, epsilon = 1e-9);
        }
    }

    #[test]
    fn open_straight_has_zero_curvature() {
        let spec = TrackSpec {
            segments: vec![Segment::straight(100.0)],
            spacing: 1.0,
            closed: false,
        };
        let t = build_synthetic_track(&spec).unwrap();
        assert!(!t.closed());
        for p in t.points() {
            assert_eq!(p.heading, 0.0);
            assert_eq!(p.curvature, 0.0);
        }
        assert_relative_eq!(t.total_length(), 100.0, epsilon = 1e-9);
    }

    #[test]
    fn default_benchmark_closes() {
        let t = build_synthetic_track(&TrackSpec::default_benchmark()).unwrap();
        assert!(t.closed());
        let first = t.points()[0];
        let last = *t.points().last().unwrap();
        // endpoint (one spacing before wrap) must sit one spacing from start
        let d = ((last.x - first.x).powi(2) + (last.y - first.y).powi(2)).sqrt();
        assert!((d - t.spacing()).abs() < 0.1, "gap {d}");
        // spacing uniform within 1%
        for w in t.points().windows(2) {
            let ds = w[1].s - w[0].s;
            assert!((ds - t.spacing()).abs() / t.spacing() < 0.01);
        }
    }

    #[test]
    fn curvature_integral_is_two_pi() {
        for track in [
            circle(50.0),
            build_synthetic_track(&TrackSpec::default_benchmark()).unwrap(),
        ] {
            let integral: f64 = track.points().iter().map(|p| p.curvature).sum::<f64>()
                * track.spacing();
            assert!(
                (integral.abs() - 2.0 * PI).abs() < 1e-3,
                "∮κ ds = {integral}"
            );
        }
    }

    #[test]
    fn curvature_matches_heading_derivative() {
        let t = build_synthetic_track(&TrackSpec::default_benchmark()).unwrap();
        let pts = t.points();
        for i in 1..pts.len() - 1 {
            let dh = pts[i + 1].heading - pts[i - 1].heading;
            let ds = pts[i + 1].s - pts[i - 1].s;
            assert!(
                (dh / ds - pts[i].curvature).abs() < 0.05,
                "at s={}: dψ/ds={} κ={}",
                pts[i].s,
                dh / ds,
                pts[i].curvature
            );
        }
    }

    #[test]
    fn nonclosure_is_rejected() {
        let spec = TrackSpec {
            segments: vec![Segment::straight(100.0)],
            spacing: 1.0,
            closed: true,
        };
        match build_synthetic_track(&spec) {
            Err(Error::NonClosure { .. }) => {}
            other => panic!("expected NonClosure, got {other:?}"),
        }
    }

    #[test]
    fn project_on_sample_point_is_exact() {
        let t = circle(50.0);
        let p = t.points()[10];
        let proj = t.project(p.x, p.y, p.heading, p.s).unwrap();
        assert_eq!(proj.lateral_error, 0.0);
        assert_relative_eq!(proj.s, p.s, epsilon = 1e-9);
        assert_relative_eq!(proj.heading_error, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn project_left_of_straight_is_positive() {
        let spec = TrackSpec {
            segments: vec![Segment::straight(100.0)],
            spacing: 1.0,
            closed: false,
        };
        let t = build_synthetic_track(&spec).unwrap();
        // track runs along +x; left is +y
        let proj = t.project(50.0, 1.0, 0.0, 50.0).unwrap();
        assert_relative_eq!(proj.lateral_error, 1.0, epsilon = 1e-9);
        let proj = t.project(50.0, -1.0, 0.0, 50.0).unwrap();
        assert_relative_eq!(proj.lateral_error, -1.0, epsilon = 1e-9);
    }

    #[test]
    fn project_inside_left_circle_is_positive() {
        // circle of radius 50 turning left, centered at (0, 50)
        let t = circle(50.0);
        // point at radius 48 from center, i.e. 2 m inside = 2 m left of path
        // brute-force oracle: nearest sample over all points
        let q = (0.0 + 48.0 * (0.3f64).sin(), 50.0 - 48.0 * (0.3f64).cos());
        let brute = t
            .points()
            .iter()
            .map(|p| ((p.x - q.0).powi(2) + (p.y - q.1).powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min);
        let proj = t.project(q.0, q.1, 0.0, 15.0).unwrap();
        assert!((proj.lateral_error - 2.0).abs() < 1e-3, "{proj:?}");
        assert!((proj.lateral_error.abs() - brute).abs() < 1.5e-3);
    }

    #[test]
    fn projection_idempotent() {
        let t = build_synthetic_track(&TrackSpec::default_benchmark()).unwrap();
        for s0 in [3.0, 250.5, 700.2, 1000.9] {
            let p = t.sample(s0);
            let proj = t.project(p.x, p.y, p.heading, s0).unwrap();
            let p2 = t.sample(proj.s);
            let proj2 = t.project(p2.x, p2.y, p2.heading, proj.s).unwrap();
            assert!((proj2.s - proj.s).abs() <= t.spacing());
        }
    }

    #[test]
    fn off_track_rejected() {
        let t = circle(50.0);
        match t.project(1e4, 1e4, 0.0, 0.0) {
            Err(Error::OffTrack { .. }) => {}
            other => panic!("expected OffTrack, got {other:?}"),
        }
    }

    #[test]
    fn projection_recovers_from_bad_hint() {
        let t = build_synthetic_track(&TrackSpec::default_benchmark()).unwrap();
        let p = t.sample(400.0);
        // hint far away forces the global fallback
        let proj = t.project(p.x, p.y, p.heading, 5.0).unwrap();
        assert!((proj.s - 400.0).abs() < 1.0, "{proj:?}");
    }

    #[test]
    fn csv_round_trip() {
        let t = build_synthetic_track(&TrackSpec::default_benchmark()).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let t2 = Track::from_csv(std::io::Cursor::new(&buf), true).unwrap();
        assert_eq!(t.points().len(), t2.points().len());
        for (a, b) in t.points().iter().zip(t2.points()) {
            assert_relative_eq!(a.x, b.x, epsilon = 1e-9);
            assert_relative_eq!(a.curvature, b.curvature, epsilon = 1e-9);
        }
    }

    #[test]
    fn csv_without_heading_recomputes_geometry() {
        let t = circle(50.0);
        let mut buf = String::from("s,x,y\n");
        for p in t.points() {
            buf.push_str(&format!("{},{},{}\n", p.s, p.x, p.y));
        }
        let t2 = Track::from_csv(std::io::Cursor::new(buf.as_bytes()), true).unwrap();
        let mid = &t2.points()[t2.points().len() / 2];
        assert!((mid.curvature - 0.02).abs() < 2e-3, "κ={}", mid.curvature);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn lateral_error_antisymmetric_on_straight(off in 0.01f64..10.0, s in 5.0f64..95.0) {
                let spec = TrackSpec {
                    segments: vec![Segment::straight(100.0)],
                    spacing: 1.0,
                    closed: false,
                };
                let t = build_synthetic_track(&spec).unwrap();
                let a = t.project(s, off, 0.0, s).unwrap();
                let b = t.project(s, -off, 0.0, s).unwrap();
                prop_assert!((a.lateral_error + b.lateral_error).abs() < 1e-9);
            }

            #[test]
            fn wrap_angle_in_range(a in -100.0f64..100.0) {
                let w = wrap_angle(a);
                prop_assert!(w > -PI - 1e-12 && w <= PI + 1e-12);
            }
        }
    }
}
