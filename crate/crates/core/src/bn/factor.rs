//! Dense factors over sorted variable scopes.

use super::Cpt;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Factor {
    /// Variable ids, strictly ascending.
    pub vars: Vec<usize>,
    pub cards: Vec<usize>,
    /// Row-major values; the last variable varies fastest.
    pub values: Vec<f64>,
}

impl Factor {
    pub fn scalar(value: f64) -> Self {
        Factor { vars: Vec::new(), cards: Vec::new(), values: vec![value] }
    }

    /// The CPT as a factor over parents and child, with observed variables
    /// fixed to their evidence state and dropped from the scope.
    pub fn from_cpt(cpt: &Cpt, observed: &[Option<usize>]) -> Self {
        let mut scope: Vec<(usize, usize)> = cpt
            .parents()
            .iter()
            .zip(cpt.parent_cardinalities())
            .map(|(&p, &c)| (p, c))
            .chain(std::iter::once((cpt.child(), cpt.child_cardinality())))
            .filter(|(v, _)| observed[*v].is_none())
            .collect();
        scope.sort_unstable();
        let vars: Vec<usize> = scope.iter().map(|s| s.0).collect();
        let cards: Vec<usize> = scope.iter().map(|s| s.1).collect();
        let size: usize = cards.iter().product();

        let max_var = cpt.parents().iter().copied().chain(std::iter::once(cpt.child())).max().unwrap_or(0);
        let mut states = vec![0usize; max_var + 1];
        for &v in cpt.parents().iter().chain(std::iter::once(&cpt.child())) {
            if let Some(s) = observed[v] {
                states[v] = s;
            }
        }
        let mut values = Vec::with_capacity(size);
        let mut counter = vec![0usize; vars.len()];
        for _ in 0..size {
            for (&v, &s) in vars.iter().zip(&counter) {
                states[v] = s;
            }
            values.push(cpt.probability_in(&states));
            increment(&mut counter, &cards);
        }
        Factor { vars, cards, values }
    }

    pub fn contains(&self, var: usize) -> bool {
        self.vars.binary_search(&var).is_ok()
    }

    pub fn product(&self, other: &Factor) -> Factor {
        let mut vars = Vec::with_capacity(self.vars.len() + other.vars.len());
        let mut cards = Vec::with_capacity(vars.capacity());
        let (mut i, mut j) = (0, 0);
        while i < self.vars.len() || j < other.vars.len() {
            let take_self = j == other.vars.len() || (i < self.vars.len() && self.vars[i] <= other.vars[j]);
            if take_self {
                if j < other.vars.len() && other.vars[j] == self.vars[i] {
                    j += 1;
                }
                vars.push(self.vars[i]);
                cards.push(self.cards[i]);
                i += 1;
            } else {
                vars.push(other.vars[j]);
                cards.push(other.cards[j]);
                j += 1;
            }
        }
        let stride_a = strides_in(&vars, &self.vars, &self.cards);
        let stride_b = strides_in(&vars, &other.vars, &other.cards);
        let size: usize = cards.iter().product();
        let mut values = Vec::with_capacity(size);
        let mut counter = vec![0usize; vars.len()];
        let (mut ia, mut ib) = (0usize, 0usize);
        for _ in 0..size {
            values.push(self.values[ia] * other.values[ib]);
            // odometer step, updating both source offsets incrementally
            for k in (0..counter.len()).rev() {
                counter[k] += 1;
                ia += stride_a[k];
                ib += stride_b[k];
                if counter[k] < cards[k] {
                    break;
                }
                ia -= stride_a[k] * cards[k];
                ib -= stride_b[k] * cards[k];
                counter[k] = 0;
            }
        }
        Factor { vars, cards, values }
    }

    pub fn sum_out(&self, var: usize) -> Factor {
        let Ok(pos) = self.vars.binary_search(&var) else {
            return self.clone();
        };
        let inner: usize = self.cards[pos + 1..].iter().product();
        let card = self.cards[pos];
        let outer: usize = self.cards[..pos].iter().product();
        let mut values = vec![0.0; outer * inner];
        for o in 0..outer {
            for s in 0..card {
                let base = (o * card + s) * inner;
                for k in 0..inner {
                    values[o * inner + k] += self.values[base + k];
                }
            }
        }
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        vars.remove(pos);
        cards.remove(pos);
        Factor { vars, cards, values }
    }
}

/// For each variable of `target`, the stride it has inside the factor
/// `(vars, cards)`; zero when the factor does not mention it.
fn strides_in(target: &[usize], vars: &[usize], cards: &[usize]) -> Vec<usize> {
    let mut own = vec![0usize; vars.len()];
    let mut acc = 1;
    for k in (0..vars.len()).rev() {
        own[k] = acc;
        acc *= cards[k];
    }
    target
        .iter()
        .map(|v| vars.binary_search(v).map(|k| own[k]).unwrap_or(0))
        .collect()
}

fn increment(counter: &mut [usize], cards: &[usize]) {
    for k in (0..counter.len()).rev() {
        counter[k] += 1;
        if counter[k] < cards[k] {
            return;
        }
        counter[k] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_marginal() {
        // f(A) = [0.2, 0.8]; g(A,B) rows over A: [0.1,0.9],[0.6,0.4]
        let f = Factor { vars: vec![0], cards: vec![2], values: vec![0.2, 0.8] };
        let g = Factor { vars: vec![0, 1], cards: vec![2, 2], values: vec![0.1, 0.9, 0.6, 0.4] };
        let h = f.product(&g);
        assert_eq!(h.vars, vec![0, 1]);
        let expected = [0.02, 0.18, 0.48, 0.32];
        for (a, b) in h.values.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let m = h.sum_out(0);
        assert_eq!(m.vars, vec![1]);
        assert!((m.values[0] - 0.5).abs() < 1e-15);
        assert!((m.values[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn product_with_disjoint_scopes() {
        let f = Factor { vars: vec![2], cards: vec![2], values: vec![1.0, 2.0] };
        let g = Factor { vars: vec![0], cards: vec![3], values: vec![1.0, 10.0, 100.0] };
        let h = f.product(&g);
        assert_eq!(h.vars, vec![0, 2]);
        assert_eq!(h.values, vec![1.0, 2.0, 10.0, 20.0, 100.0, 200.0]);
        let s = Factor::scalar(3.0).product(&f);
        assert_eq!(s.values, vec![3.0, 6.0]);
    }
}
