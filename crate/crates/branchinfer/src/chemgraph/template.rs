//! Complete rooted tree templates `T(a, b, c)`.

/// The rooted tree `T(a, b, c)`: the root has `a` children, every other
/// non-leaf vertex has `b` children, and all leaves have depth `c`.
///
/// Vertices are numbered `1..=n` in breadth-first order; index 0 is unused.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTreeTemplate {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub n: usize,
    pub n_nonleaf: usize,
    /// `prt[j]` is the parent of vertex `j` (0 for the root).
    pub prt: Vec<usize>,
    /// `cld[i]` lists the children of vertex `i` in order.
    pub cld: Vec<Vec<usize>>,
    pub depth: Vec<usize>,
    /// Precedence pairs `(i, j)`: vertex `j` may be used only if `i` is.
    pub p_prc: Vec<(usize, usize)>,
}

/// `1 + a (b^c - 1) / (b - 1)` for `b >= 2`, and `1 + a c` for `b = 1`.
pub fn template_size(a: usize, b: usize, c: usize) -> usize {
    if c == 0 {
        return 1;
    }
    if b == 1 {
        return 1 + a * c;
    }
    1 + a * (b.pow(c as u32) - 1) / (b - 1)
}

impl RootedTreeTemplate {
    pub fn new(a: usize, b: usize, c: usize) -> Self {
        let n = template_size(a, b, c);
        let n_nonleaf = if c == 0 { 0 } else { template_size(a, b, c - 1) };
        let mut prt = vec![0; n + 1];
        let mut cld = vec![Vec::new(); n + 1];
        let mut depth = vec![0; n + 1];
        let mut next = 2;
        for i in 1..=n {
            if depth[i] == c {
                continue;
            }
            let k = if i == 1 { a } else { b };
            for _ in 0..k {
                let j = next;
                next += 1;
                prt[j] = i;
                depth[j] = depth[i] + 1;
                cld[i].push(j);
            }
        }
        debug_assert_eq!(next, n + 1);
        let mut p_prc = Vec::new();
        for (j, &p) in prt.iter().enumerate().take(n + 1).skip(2) {
            p_prc.push((p, j));
        }
        for kids in cld.iter().take(n + 1).skip(1) {
            for w in kids.windows(2) {
                p_prc.push((w[0], w[1]));
            }
        }
        RootedTreeTemplate {
            a,
            b,
            c,
            n,
            n_nonleaf,
            prt,
            cld,
            depth,
            p_prc,
        }
    }

    /// Vertices at depth `d`.
    pub fn at_depth(&self, d: usize) -> Vec<usize> {
        (1..=self.n).filter(|&i| self.depth[i] == d).collect()
    }

    /// Leaves of the template (depth `c`).
    pub fn leaves(&self) -> Vec<usize> {
        self.at_depth(self.c)
    }

    /// Path from the root to `j`, excluding the root.
    pub fn path_to(&self, mut j: usize) -> Vec<usize> {
        let mut p = Vec::new();
        while j != 1 {
            p.push(j);
            j = self.prt[j];
        }
        p.reverse();
        p
    }

    /// Whether `j` lies in the subtree of `i`.
    pub fn is_descendant(&self, mut j: usize, i: usize) -> bool {
        loop {
            if j == i {
                return true;
            }
            if j <= 1 {
                return false;
            }
            j = self.prt[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t322() {
        let t = RootedTreeTemplate::new(3, 2, 2);
        assert_eq!((t.n, t.n_nonleaf), (10, 4));
        assert_eq!(t.leaves(), vec![5, 6, 7, 8, 9, 10]);
        assert_eq!(t.cld[1], vec![2, 3, 4]);
        assert_eq!(t.cld[2], vec![5, 6]);
        assert_eq!(t.path_to(5), vec![2, 5]);
        assert_eq!(t.path_to(10), vec![4, 10]);
    }

    #[test]
    fn t222_and_root_only() {
        let t = RootedTreeTemplate::new(2, 2, 2);
        assert_eq!((t.n, t.n_nonleaf), (7, 3));
        let r = RootedTreeTemplate::new(1, 2, 0);
        assert_eq!((r.n, r.n_nonleaf), (1, 0));
        assert!(r.p_prc.is_empty());
    }

    #[test]
    fn formulas_hold_up_to_200() {
        for a in 1..=6 {
            for b in 2..=5 {
                for c in 0..=6 {
                    let n = template_size(a, b, c);
                    if n > 200 {
                        continue;
                    }
                    let t = RootedTreeTemplate::new(a, b, c);
                    let by_formula = a * (b.pow(c as u32) - 1) / (b - 1) + 1;
                    assert_eq!(t.n, by_formula);
                    if c >= 1 {
                        let nl = a * (b.pow(c as u32 - 1) - 1) / (b - 1) + 1;
                        assert_eq!(t.n_nonleaf, nl);
                        assert_eq!((1..=t.n).filter(|&i| !t.cld[i].is_empty()).count(), nl);
                    }
                    let edges: usize = t.cld.iter().map(Vec::len).sum();
                    assert_eq!(edges + 1, t.n);
                }
            }
        }
    }

    #[test]
    fn precedence_reaches_every_vertex_from_root() {
        // every non-root vertex has a chain of pairs back to the root
        let t = RootedTreeTemplate::new(2, 3, 3);
        for j in 2..=t.n {
            let mut x = j;
            let mut steps = 0;
            while x != 1 {
                x = t.p_prc.iter().find(|&&(_, b)| b == x).unwrap().0;
                steps += 1;
                assert!(steps <= t.n);
            }
        }
        // consecutive siblings are ordered
        assert!(t.p_prc.contains(&(2, 3)));
        assert!(!t.p_prc.contains(&(3, 2)));
    }
}
