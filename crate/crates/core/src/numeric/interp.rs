/// Quintic Hermite interpolation on a uniform grid from values and the first
/// two derivatives.
#[derive(Clone, Debug)]
pub struct QuinticTable {
    x0: f64,
    h: f64,
    f: Vec<[f64; 3]>,
}

impl QuinticTable {
    /// `nodes[k] = [f, f', f'']` at x0 + k h.
    pub fn new(x0: f64, h: f64, nodes: Vec<[f64; 3]>) -> Self {
        assert!(nodes.len() >= 2 && h > 0.0);
        QuinticTable { x0, h, f: nodes }
    }

    pub fn x_min(&self) -> f64 {
        self.x0
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.h * (self.f.len() - 1) as f64
    }

    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.f
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let u = (x - self.x0) / self.h;
        let k = (u.floor() as isize).clamp(0, self.f.len() as isize - 2) as usize;
        let s = u - k as f64;
        let [a0, a1, a2] = self.f[k];
        let [b0, b1, b2] = self.f[k + 1];
        let h = self.h;
        let s2 = s * s;
        let s3 = s2 * s;
        let s4 = s3 * s;
        let s5 = s4 * s;
        let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
        let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
        let h2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
        let g0 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
        let g1 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
        let g2 = 0.5 * (s3 - 2.0 * s4 + s5);
        a0 * h0 + h * a1 * h1 + h * h * a2 * h2 + b0 * g0 + h * b1 * g1 + h * h * b2 * g2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quintics() {
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(3) - 0.3 * x.powi(4) + 0.07 * x.powi(5);
        let dp = |x: f64| -2.0 + 1.5 * x * x - 1.2 * x.powi(3) + 0.35 * x.powi(4);
        let ddp = |x: f64| 3.0 * x - 3.6 * x * x + 1.4 * x.powi(3);
        let h = 0.37;
        let nodes = (0..10)
            .map(|k| {
                let x = -1.0 + h * k as f64;
                [p(x), dp(x), ddp(x)]
            })
            .collect();
        let t = QuinticTable::new(-1.0, h, nodes);
        for j in 0..300 {
            let x = -1.0 + 3.3 * j as f64 / 300.0;
            assert!((t.eval(x) - p(x)).abs() < 1e-12, "{x}");
        }
    }

    #[test]
    fn smooth_function_accuracy() {
        let h = 1.0 / 128.0;
        let nodes = (0..=256)
            .map(|k| {
                let x = k as f64 * h;
                [x.sin(), x.cos(), -x.sin()]
            })
            .collect();
        let t = QuinticTable::new(0.0, h, nodes);
        let mut worst: f64 = 0.0;
        for j in 0..1000 {
            let x = 2.0 * j as f64 / 1000.0;
            worst = worst.max((t.eval(x) - x.sin()).abs());
        }
        assert!(worst < 1e-15, "{worst}");
    }
}
