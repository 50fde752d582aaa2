//! Longest-common-extension queries over integer texts via a suffix array,
//! Kasai LCP and a sparse-table range minimum.

pub(crate) struct Lce {
    rank: Vec<u32>,
    // table[k][i] = min lcp over sa positions i+1 ..= i + 2^k
    table: Vec<Vec<u32>>,
    len: usize,
}

pub(crate) fn suffix_array(text: &[u32]) -> Vec<u32> {
    let n = text.len();
    if n == 0 {
        return Vec::new();
    }
    // ranks start at 1; 0 marks "past the end"
    let mut rank: Vec<usize> = {
        let mut sorted: Vec<u32> = text.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        text.iter().map(|c| sorted.binary_search(c).unwrap() + 1).collect()
    };
    let mut sa: Vec<usize> = (0..n).collect();
    let mut tmp = vec![0usize; n];
    let mut buf = vec![0usize; n];
    let mut k = 1;
    loop {
        let buckets = rank.iter().copied().max().unwrap_or(0) + 2;
        let second = |i: usize, rank: &[usize]| if i + k < n { rank[i + k] } else { 0 };
        // counting sort by second key, then stable by first key
        let mut count = vec![0usize; buckets];
        for i in 0..n {
            count[second(i, &rank)] += 1;
        }
        let mut sum = 0;
        for c in count.iter_mut() {
            let t = *c;
            *c = sum;
            sum += t;
        }
        for i in 0..n {
            let key = second(i, &rank);
            buf[count[key]] = i;
            count[key] += 1;
        }
        let mut count = vec![0usize; buckets];
        for i in 0..n {
            count[rank[i]] += 1;
        }
        let mut sum = 0;
        for c in count.iter_mut() {
            let t = *c;
            *c = sum;
            sum += t;
        }
        for &i in &buf {
            let key = rank[i];
            sa[count[key]] = i;
            count[key] += 1;
        }
        tmp[sa[0]] = 1;
        for idx in 1..n {
            let (a, b) = (sa[idx - 1], sa[idx]);
            let differs = rank[a] != rank[b] || second(a, &rank) != second(b, &rank);
            tmp[b] = tmp[a] + differs as usize;
        }
        std::mem::swap(&mut rank, &mut tmp);
        if rank[sa[n - 1]] == n {
            break;
        }
        k *= 2;
    }
    sa.into_iter().map(|i| i as u32).collect()
}

impl Lce {
    pub(crate) fn new(text: &[u32]) -> Self {
        let n = text.len();
        let sa = suffix_array(text);
        let mut rank = vec![0u32; n];
        for (i, &s) in sa.iter().enumerate() {
            rank[s as usize] = i as u32;
        }
        // Kasai: lcp[i] = lcp(sa[i-1], sa[i])
        let mut lcp = vec![0u32; n];
        let mut h = 0usize;
        for i in 0..n {
            let r = rank[i] as usize;
            if r > 0 {
                let j = sa[r - 1] as usize;
                while i + h < n && j + h < n && text[i + h] == text[j + h] {
                    h += 1;
                }
                lcp[r] = h as u32;
                h = h.saturating_sub(1);
            } else {
                h = 0;
            }
        }
        let mut table = vec![lcp];
        let mut span = 1;
        while 2 * span <= n {
            let prev = table.last().unwrap();
            let next: Vec<u32> = (0..n)
                .map(|i| {
                    if i + span < n {
                        prev[i].min(prev[i + span])
                    } else {
                        prev[i]
                    }
                })
                .collect();
            table.push(next);
            span *= 2;
        }
        Lce { rank, table, len: n }
    }

    /// Length of the longest common prefix of the suffixes at `i` and `j`.
    pub(crate) fn query(&self, i: usize, j: usize) -> usize {
        if i == j {
            return self.len - i;
        }
        let (a, b) = {
            let (ri, rj) = (self.rank[i] as usize, self.rank[j] as usize);
            if ri < rj {
                (ri + 1, rj)
            } else {
                (rj + 1, ri)
            }
        };
        self.range_min(a, b) as usize
    }

    /// Minimum of lcp over suffix-array positions `a ..= b`.
    pub(crate) fn range_min(&self, a: usize, b: usize) -> u32 {
        let span = b - a + 1;
        let k = usize::BITS as usize - 1 - span.leading_zeros() as usize;
        self.table[k][a].min(self.table[k][b + 1 - (1 << k)])
    }

    pub(crate) fn rank(&self, i: usize) -> usize {
        self.rank[i] as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_lce(t: &[u32], i: usize, j: usize) -> usize {
        t[i..].iter().zip(&t[j..]).take_while(|(a, b)| a == b).count()
    }

    #[test]
    fn suffix_array_sorts_suffixes() {
        let text: Vec<u32> = "mississippi".bytes().map(u32::from).collect();
        let sa = suffix_array(&text);
        for w in sa.windows(2) {
            assert!(text[w[0] as usize..] < text[w[1] as usize..]);
        }
    }

    #[test]
    fn lce_matches_naive() {
        let text: Vec<u32> = "abaababaabaababaababa".bytes().map(u32::from).collect();
        let lce = Lce::new(&text);
        for i in 0..text.len() {
            for j in 0..text.len() {
                assert_eq!(lce.query(i, j), naive_lce(&text, i, j), "{i} {j}");
            }
        }
    }
}
