use ndarray::Array2;

use crate::error::{Error, Result};

/// Area under the ROC curve via the Mann-Whitney rank statistic; tied
/// scores count one half.
pub fn roc_auc(scores: &[f64], positive: &[bool]) -> Result<f64> {
    if scores.len() != positive.len() {
        return Err(Error::Argument(format!(
            "{} scores for {} labels",
            scores.len(),
            positive.len()
        )));
    }
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Degenerate("need both positive and negative examples".into()));
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        // ranks are 1-based; a tie block shares its average rank
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            if positive[k] {
                rank_sum += avg;
            }
        }
        i = j + 1;
    }
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Binary AUC on the class-1 column, or the one-vs-rest macro average over
/// classes that have both positives and negatives. `scores` may hold class
/// probabilities or any per-column increasing transform of them, such as
/// log-probabilities.
pub fn auc_from_scores(probs: &Array2<f64>, labels: &[usize]) -> Result<f64> {
    let mut present: Vec<usize> = labels.to_vec();
    present.sort_unstable();
    present.dedup();
    if present.len() < 2 {
        return Err(Error::Degenerate(format!(
            "evaluation set holds a single class ({:?})",
            present
        )));
    }
    let k = probs.ncols();
    if k == 2 {
        // column difference: for log-probabilities this is the logit gap,
        // which stays informative after the probabilities saturate
        let scores: Vec<f64> = probs.rows().into_iter().map(|r| r[1] - r[0]).collect();
        let pos: Vec<bool> = labels.iter().map(|&y| y == 1).collect();
        return roc_auc(&scores, &pos);
    }
    let mut total = 0.0;
    let mut used = 0;
    for &c in &present {
        if c >= k {
            continue;
        }
        let scores: Vec<f64> = probs.column(c).to_vec();
        let pos: Vec<bool> = labels.iter().map(|&y| y == c).collect();
        total += roc_auc(&scores, &pos)?;
        used += 1;
    }
    Ok(total / used as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_example() {
        let a = roc_auc(&[0.1, 0.4, 0.35, 0.8], &[false, false, true, true]).unwrap();
        assert!((a - 0.75).abs() < 1e-15);
    }

    #[test]
    fn ordered_and_tied() {
        assert_eq!(roc_auc(&[0.1, 0.2, 0.3], &[false, true, true]).unwrap(), 1.0);
        assert_eq!(roc_auc(&[0.5; 4], &[false, true, false, true]).unwrap(), 0.5);
    }

    #[test]
    fn single_class_is_degenerate() {
        let e = roc_auc(&[0.1, 0.2], &[true, true]).unwrap_err();
        assert_eq!(e.kind(), "DegenerateError");
        let probs = Array2::from_shape_vec((2, 2), vec![0.5, 0.5, 0.4, 0.6]).unwrap();
        assert_eq!(auc_from_scores(&probs, &[1, 1]).unwrap_err().kind(), "DegenerateError");
    }

    #[test]
    fn multiclass_macro_average() {
        // each class ranked perfectly by its own column
        let probs = Array2::from_shape_vec(
            (3, 3),
            vec![0.8, 0.1, 0.1, 0.1, 0.8, 0.1, 0.1, 0.1, 0.8],
        )
        .unwrap();
        assert_eq!(auc_from_scores(&probs, &[0, 1, 2]).unwrap(), 1.0);
    }
}
