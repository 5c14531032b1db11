/// Neumaier-compensated accumulator. Results depend only on the order of `add` calls.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator, in iteration order.
pub fn ksum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut k = KahanSum::new();
    for x in it {
        k.add(x);
    }
    k.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_terms() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(ksum(v), 2.0);
        let naive: f64 = v.iter().sum();
        assert_ne!(naive, 2.0);
    }
}
