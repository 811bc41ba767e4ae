use crate::prelude::*;

pub type Point = [f64; 2];

pub fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Distance from `c` to the closed segment `ab`.
pub fn segment_distance(a: Point, b: Point, c: Point) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        (((c[0] - a[0]) * ab[0] + (c[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    dist([a[0] + t * ab[0], a[1] + t * ab[1]], c)
}

/// True when the segment enters the open disc.
pub fn segment_hits_circle(a: Point, b: Point, center: Point, radius: f64) -> bool {
    segment_distance(a, b, center) < radius
}

/// `start`, the waypoints packed as `[x0, y0, x1, y1, ..]`, then `goal`.
pub fn polyline(start: Point, waypoints: &[f64], goal: Point) -> Vec<Point> {
    let mut pts = Vec::with_capacity(waypoints.len() / 2 + 2);
    pts.push(start);
    pts.extend(waypoints.chunks_exact(2).map(|w| [w[0], w[1]]));
    pts.push(goal);
    pts
}

pub fn polyline_length(pts: &[Point]) -> f64 {
    pts.windows(2).map(|w| dist(w[0], w[1])).sum()
}

/// Point reached after travelling `d` along the polyline; the last vertex
/// when the polyline is shorter than `d`.
pub fn walk(pts: &[Point], mut d: f64) -> Point {
    for w in pts.windows(2) {
        let len = dist(w[0], w[1]);
        if len >= d && len > 0.0 {
            let t = d / len;
            return [w[0][0] + t * (w[1][0] - w[0][0]), w[0][1] + t * (w[1][1] - w[0][1])];
        }
        d -= len;
    }
    pts[pts.len() - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_distance_cases() {
        assert_eq!(segment_distance([0.0, 0.0], [10.0, 0.0], [5.0, 3.0]), 3.0);
        assert_eq!(segment_distance([0.0, 0.0], [10.0, 0.0], [13.0, 4.0]), 5.0);
        assert_eq!(segment_distance([1.0, 1.0], [1.0, 1.0], [4.0, 5.0]), 5.0);
    }

    #[test]
    fn walk_crosses_vertices() {
        let pts = [[0.0, 0.0], [3.0, 0.0], [3.0, 10.0]];
        assert_eq!(walk(&pts, 2.0), [2.0, 0.0]);
        assert_eq!(walk(&pts, 5.0), [3.0, 2.0]);
        assert_eq!(walk(&pts, 50.0), [3.0, 10.0]);
        assert_eq!(polyline_length(&pts), 13.0);
    }
}
