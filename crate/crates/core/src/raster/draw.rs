use crate::cloud::{DOMAIN_MAX, DOMAIN_MIN, DOMAIN_WIDTH};

/// Pixel grid over the domain, row 0 at the top (`y = 10`).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Grid {
    pub res: usize,
}

impl Grid {
    pub fn scale(&self) -> f64 {
        self.res as f64 / DOMAIN_WIDTH
    }

    /// Unclamped pixel of a plane point as `(col, row)`.
    pub fn locate(&self, x: f64, y: f64) -> (i64, i64) {
        let col = ((x - DOMAIN_MIN) * self.scale()).floor() as i64;
        let row = ((DOMAIN_MAX - y) * self.scale()).floor() as i64;
        (col, row)
    }

    /// Like [`locate`](Self::locate) but clamped, so that the closed edges
    /// `x = 10` and `y = -10` land in the last column and row.
    pub fn locate_clamped(&self, x: f64, y: f64) -> (i64, i64) {
        let max = self.res as i64 - 1;
        let (c, r) = self.locate(x, y);
        (c.clamp(0, max), r.clamp(0, max))
    }

    pub fn center(&self, col: usize, row: usize) -> (f64, f64) {
        let step = DOMAIN_WIDTH / self.res as f64;
        (
            DOMAIN_MIN + (col as f64 + 0.5) * step,
            DOMAIN_MAX - (row as f64 + 0.5) * step,
        )
    }
}

/// Binary occupancy plane.
pub(crate) struct Canvas<'a> {
    pub res: usize,
    pub pixels: &'a mut [f32],
}

impl Canvas<'_> {
    pub fn stamp(&mut self, col: i64, row: i64) {
        let n = self.res as i64;
        if (0..n).contains(&col) && (0..n).contains(&row) {
            self.pixels[row as usize * self.res + col as usize] = 1.0;
        }
    }

    /// Bresenham segment including both endpoints; pixels off the canvas
    /// are skipped.
    pub fn line(&mut self, from: (i64, i64), to: (i64, i64)) {
        let (mut x0, mut y0) = from;
        let (x1, y1) = to;
        let dx = (x1 - x0).abs();
        let dy = -(y1 - y0).abs();
        let sx = if x0 < x1 { 1 } else { -1 };
        let sy = if y0 < y1 { 1 } else { -1 };
        let mut err = dx + dy;
        loop {
            self.stamp(x0, y0);
            if x0 == x1 && y0 == y1 {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x0 += sx;
            }
            if e2 <= dx {
                err += dx;
                y0 += sy;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(res: usize, from: (i64, i64), to: (i64, i64)) -> Vec<(usize, usize)> {
        let mut px = vec![0.0; res * res];
        Canvas {
            res,
            pixels: &mut px,
        }
        .line(from, to);
        px.iter()
            .enumerate()
            .filter(|(_, v)| **v > 0.0)
            .map(|(i, _)| (i % res, i / res))
            .collect()
    }

    #[test]
    fn bresenham_shapes() {
        assert_eq!(lit(8, (1, 1), (1, 1)), [(1, 1)]);
        assert_eq!(lit(8, (0, 0), (3, 0)), [(0, 0), (1, 0), (2, 0), (3, 0)]);
        assert_eq!(lit(8, (0, 0), (3, 3)).len(), 4);
        assert_eq!(lit(8, (0, 0), (6, 2)).len(), 7);
        assert_eq!(lit(8, (6, 2), (0, 0)).len(), 7);
        // clipped
        assert_eq!(lit(4, (2, 0), (6, 0)), [(2, 0), (3, 0)]);
    }

    #[test]
    fn pixel_mapping() {
        let g = Grid { res: 128 };
        assert_eq!(g.locate_clamped(-10.0, 10.0), (0, 0));
        assert_eq!(g.locate_clamped(10.0, -10.0), (127, 127));
        assert_eq!(g.locate(0.0, 0.0), (64, 64));
        let (x, y) = g.center(0, 0);
        assert!((x + 10.0 - 20.0 / 256.0).abs() < 1e-12);
        assert!((y - 10.0 + 20.0 / 256.0).abs() < 1e-12);
        let (x, y) = g.center(64, 64);
        assert_eq!(g.locate(x, y), (64, 64));
    }
}
