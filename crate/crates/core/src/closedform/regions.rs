use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Parallelogram,
    PentagonP1,
    PentagonP2,
}

/// A convex polygon in the `(H1, H2)` plane, vertices counter-clockwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportRegion {
    pub kind: RegionKind,
    pub vertices: Vec<(f64, f64)>,
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Convex hull by monotone chain; collinear and duplicate points are dropped.
pub fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite vertices"));
    pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-14 && (a.1 - b.1).abs() < 1e-14);
    if pts.len() < 3 {
        return pts;
    }
    let eps = 1e-14;
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= eps {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= eps {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

impl SupportRegion {
    pub fn from_points(kind: RegionKind, points: &[(f64, f64)]) -> Self {
        Self { kind, vertices: convex_hull(points) }
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        if n < 3 {
            return 0.0;
        }
        0.5 * (0..n)
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % n]);
                a.0 * b.1 - b.0 * a.1
            })
            .sum::<f64>()
    }

    /// Signed distance-like margin: the smallest inward distance to an edge line.
    /// Positive inside, negative outside.
    pub fn margin(&self, h: (f64, f64)) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        match n {
            0 => f64::NEG_INFINITY,
            1 => -((h.0 - v[0].0).hypot(h.1 - v[0].1)),
            2 => -segment_distance(v[0], v[1], h),
            _ => (0..n)
                .map(|i| {
                    let (a, b) = (v[i], v[(i + 1) % n]);
                    cross(a, b, h) / (b.0 - a.0).hypot(b.1 - a.1)
                })
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Half-plane membership with an absolute tolerance.
    pub fn contains(&self, h: (f64, f64), tol: f64) -> bool {
        self.margin(h) >= -tol
    }

    pub fn bounding_box(&self) -> ((f64, f64), (f64, f64)) {
        let xs = self.vertices.iter().map(|v| v.0);
        let ys = self.vertices.iter().map(|v| v.1);
        (
            (xs.clone().fold(f64::INFINITY, f64::min), xs.fold(f64::NEG_INFINITY, f64::max)),
            (ys.clone().fold(f64::INFINITY, f64::min), ys.fold(f64::NEG_INFINITY, f64::max)),
        )
    }
}

fn segment_distance(a: (f64, f64), b: (f64, f64), h: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((h.0 - a.0) * dx + (h.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
    (h.0 - a.0 - t * dx).hypot(h.1 - a.1 - t * dy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_of_square_with_interior_points() {
        let pts = [(0.0, 0.0), (1.0, 0.0), (0.5, 0.5), (1.0, 1.0), (0.0, 1.0), (0.5, 0.0)];
        let r = SupportRegion::from_points(RegionKind::Parallelogram, &pts);
        assert_eq!(r.vertices.len(), 4);
        assert!((r.area() - 1.0).abs() < 1e-15);
        assert!(r.contains((0.5, 0.5), 0.0));
        assert!(r.contains((1.0, 0.5), 1e-15));
        assert!(!r.contains((1.1, 0.5), 1e-3));
        assert!((r.margin((0.5, 0.25)) - 0.25).abs() < 1e-15);
    }
}
