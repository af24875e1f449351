/// Disjoint sets over `0..n` with path halving and union by size. Each root
/// also remembers the representative vertex of its set, which the caller
/// chooses on every union.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    representative: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
            representative: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            let grand = self.parent[self.parent[x]];
            self.parent[x] = grand;
            x = grand;
        }
        x
    }

    pub fn representative(&mut self, x: usize) -> usize {
        let root = self.find(x);
        self.representative[root]
    }

    /// Join the sets of `a` and `b` and label the result with `representative`.
    /// Returns the new root.
    pub fn union(&mut self, a: usize, b: usize, representative: usize) -> usize {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra != rb {
            if self.size[ra] < self.size[rb] {
                std::mem::swap(&mut ra, &mut rb);
            }
            self.parent[rb] = ra;
            self.size[ra] += self.size[rb];
        }
        self.representative[ra] = representative;
        ra
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unions_track_representatives() {
        let mut uf = UnionFind::new(6);
        uf.union(0, 1, 1);
        uf.union(2, 3, 3);
        assert_eq!(uf.representative(0), 1);
        assert_ne!(uf.find(1), uf.find(2));
        uf.union(1, 3, 0);
        for x in 0..4 {
            assert_eq!(uf.representative(x), 0);
        }
        assert_eq!(uf.representative(5), 5);
    }
}
