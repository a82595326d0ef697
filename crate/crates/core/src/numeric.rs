//! Small numerical kernels shared by the closed forms.

/// `C(n, k)` as a float. Exact for every `n` up to the crate's user cap.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1u64;
    for i in 0..k as u64 {
        c = c * (n as u64 - i) / (i + 1);
    }
    c as f64
}

/// Neumaier-compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `sum_{j=1}^{n} C(n,j) (-1)^(j+1) term(j)`, accumulated in descending
/// magnitude with compensation. Also returns `sum |C(n,j) term(j)|`, the
/// scale against which cancellation error should be judged.
pub fn alternating_binomial_sum(n: u32, term: impl Fn(u32) -> f64) -> (f64, f64) {
    let mut parts: Vec<f64> = (1..=n)
        .map(|j| {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            sign * binomial(n, j) * term(j)
        })
        .collect();
    parts.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    let mut acc = CompensatedSum::default();
    let mut magnitude = 0.0;
    for p in parts {
        acc.add(p);
        magnitude += p.abs();
    }
    (acc.value(), magnitude)
}
