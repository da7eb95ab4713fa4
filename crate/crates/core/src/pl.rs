//! Monotone piecewise-linear maps with exact rational breakpoints.

use crate::rat::{to_f64, Q};

/// A nondecreasing piecewise-linear map given by its breakpoints
/// `(x_0,y_0), .., (x_k,y_k)` with `x` strictly increasing and `y` nondecreasing.
/// Outside `[x_0, x_k]` the map is clamped to the end values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlMap {
    breaks: Vec<(Q, Q)>,
}

impl PlMap {
    pub fn new(breaks: Vec<(Q, Q)>) -> PlMap {
        assert!(breaks.len() >= 2, "need at least two breakpoints");
        for w in breaks.windows(2) {
            assert!(w[0].0 < w[1].0, "x breakpoints must strictly increase");
            assert!(w[0].1 <= w[1].1, "map must be nondecreasing");
        }
        PlMap { breaks }
    }

    pub fn breaks(&self) -> &[(Q, Q)] {
        &self.breaks
    }

    pub fn eval(&self, x: &Q) -> Q {
        let first = &self.breaks[0];
        let last = self.breaks.last().unwrap();
        if *x <= first.0 {
            return first.1.clone();
        }
        if *x >= last.0 {
            return last.1.clone();
        }
        for w in self.breaks.windows(2) {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            if x <= x1 {
                let t = (x - x0) / (x1 - x0);
                return y0 + t * (y1 - y0);
            }
        }
        unreachable!()
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let first = (to_f64(&self.breaks[0].0), to_f64(&self.breaks[0].1));
        if x <= first.0 {
            return first.1;
        }
        let last = self.breaks.last().unwrap();
        let last = (to_f64(&last.0), to_f64(&last.1));
        if x >= last.0 {
            return last.1;
        }
        for w in self.breaks.windows(2) {
            let (x0, y0) = (to_f64(&w[0].0), to_f64(&w[0].1));
            let (x1, y1) = (to_f64(&w[1].0), to_f64(&w[1].1));
            if x <= x1 {
                return y0 + (x - x0) / (x1 - x0) * (y1 - y0);
            }
        }
        unreachable!()
    }

    /// Applies the map to each coordinate of a nondecreasing tuple.
    pub fn map_tuple(&self, t: &[Q]) -> Vec<Q> {
        t.iter().map(|x| self.eval(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    #[test]
    fn eval_clamps_and_interpolates() {
        let f = PlMap::new(vec![(q(-1, 1), q(-1, 1)), (q(0, 1), q(1, 1)), (q(1, 1), q(1, 1))]);
        assert_eq!(f.eval(&q(-2, 1)), q(-1, 1));
        assert_eq!(f.eval(&q(-1, 2)), q(0, 1));
        assert_eq!(f.eval(&q(1, 2)), q(1, 1));
        assert_eq!(f.eval(&q(1, 1)), q(1, 1));
    }
}
