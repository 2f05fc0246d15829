/// Tie-averaged ranks, rank 1 for the largest value. Only exactly equal
/// values tie.
pub fn tie_averaged_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share the mean of ranks i+1..=j+1
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Graded relevance `n + 1 - ceil(rank)`, at least 1. With 63 workflows the
/// best one gets 63.
pub fn ranks_to_relevance(ranks: &[f64]) -> Vec<u32> {
    let n = ranks.len() as f64;
    ranks
        .iter()
        .map(|&r| (n + 1.0 - r.ceil()).max(1.0) as u32)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(tie_averaged_ranks(&[0.9, 0.5, 0.1]), vec![1.0, 2.0, 3.0]);
        assert_eq!(tie_averaged_ranks(&[0.9, 0.9, 0.1]), vec![1.5, 1.5, 3.0]);
        assert_eq!(tie_averaged_ranks(&[0.1, 0.9, 0.9, 0.9]), vec![4.0, 2.0, 2.0, 2.0]);
    }

    #[test]
    fn relevance_of_63() {
        let mut ranks = vec![0.0; 63];
        ranks[0] = 1.0;
        ranks[1] = 63.0;
        ranks[2] = 1.5;
        let z = ranks_to_relevance(&ranks);
        assert_eq!((z[0], z[1], z[2]), (63, 1, 62));
    }

    #[test]
    fn rank_sum_identity() {
        let v: Vec<f64> = (0..63).map(|i| ((i * 37) % 11) as f64 / 10.0).collect();
        let s: f64 = tie_averaged_ranks(&v).iter().sum();
        assert_eq!(s, 2016.0);
    }
}
