use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::topomap::TensorData;

/// Images stored back to back in HWC order, with one label each.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub shape: [usize; 3],
    pub images: Vec<T>,
    pub labels: Vec<u32>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(shape: [usize; 3], images: Vec<T>, labels: Vec<u32>) -> Result<Self> {
        let per = shape.iter().product::<usize>();
        if per == 0 || images.len() != per * labels.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} values cannot hold {} images of shape {shape:?}",
                images.len(),
                labels.len()
            )));
        }
        if images.iter().any(|v| !v.is_finite()) {
            return Err(Error::ShapeMismatch("image data contains non-finite values".into()));
        }
        Ok(Dataset { shape, images, labels })
    }

    /// Builds a dataset from an `[N, H, W, C]` tensor file payload.
    pub fn from_tensor(tensor: &TensorData, labels: Vec<u32>) -> Result<Self> {
        let &[n, h, w, c] = tensor.dims.as_slice() else {
            return Err(Error::ShapeMismatch(format!("image tensor must be 4-D, got {:?}", tensor.dims)));
        };
        if n != labels.len() {
            return Err(Error::ShapeMismatch(format!("{n} images but {} labels", labels.len())));
        }
        Dataset::new([h, w, c], tensor.data.iter().map(|&v| T::of(v as f64)).collect(), labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn image_len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn image(&self, i: usize) -> &[T] {
        let n = self.image_len();
        &self.images[i * n..(i + 1) * n]
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset<T> {
        let mut images = Vec::with_capacity(indices.len() * self.image_len());
        for &i in indices {
            images.extend_from_slice(self.image(i));
        }
        Dataset {
            shape: self.shape,
            images,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// One more than the largest label, or 0 when empty.
    pub fn label_span(&self) -> usize {
        self.labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0)
    }
}

/// Sample indices of a train/validation/test partition, each sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

pub fn validate_fractions(fractions: [f64; 3]) -> Result<()> {
    if fractions.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
        return Err(Error::InvalidConfig(format!("split fractions must be positive, got {fractions:?}")));
    }
    let sum: f64 = fractions.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidConfig(format!("split fractions sum to {sum}, not 1")));
    }
    Ok(())
}

/// Rounds the table `counts[c] * sizes[p] / n` to integers so that every
/// row sums to `counts[c]`, every column to `sizes[p]`, and each cell moves
/// by less than one. Cells start at their floor; the leftover units are
/// placed by augmenting paths over cells with a fractional part, which always
/// succeeds because the fractional table itself is a feasible flow.
fn round_table(counts: &[usize], sizes: [usize; 3], n: usize) -> Vec<[usize; 3]> {
    let mut cells: Vec<[usize; 3]> = counts.iter().map(|&k| sizes.map(|s| k * s / n)).collect();
    let open = |c: usize, p: usize| !(counts[c] * sizes[p]).is_multiple_of(n);
    let mut col_need: Vec<usize> = (0..3).map(|p| sizes[p] - cells.iter().map(|r| r[p]).sum::<usize>()).collect();
    let mut raised = vec![[false; 3]; counts.len()];
    for c in 0..counts.len() {
        let row_need = counts[c] - cells[c].iter().sum::<usize>();
        for _ in 0..row_need {
            // breadth-first search over alternating paths:
            // class --(unraised open cell)--> part --(raised cell)--> class
            let mut prev_class: Vec<Option<usize>> = vec![None; 3];
            let mut prev_part: Vec<Option<usize>> = vec![None; counts.len()];
            let mut seen = vec![false; counts.len()];
            seen[c] = true;
            let mut queue = std::collections::VecDeque::from([c]);
            let mut end = None;
            'search: while let Some(u) = queue.pop_front() {
                for p in 0..3 {
                    if prev_class[p].is_some() || raised[u][p] || !open(u, p) {
                        continue;
                    }
                    prev_class[p] = Some(u);
                    if col_need[p] > 0 {
                        end = Some(p);
                        break 'search;
                    }
                    for v in 0..counts.len() {
                        if !seen[v] && raised[v][p] {
                            seen[v] = true;
                            prev_part[v] = Some(p);
                            queue.push_back(v);
                        }
                    }
                }
            }
            let mut p = end.expect("fractional table guarantees an augmenting path");
            col_need[p] -= 1;
            loop {
                let u = prev_class[p].unwrap();
                raised[u][p] = true;
                match prev_part[u] {
                    Some(q) => {
                        raised[u][q] = false;
                        p = q;
                    }
                    None => break,
                }
            }
        }
    }
    for (row, r) in cells.iter_mut().zip(&raised) {
        for p in 0..3 {
            row[p] += r[p] as usize;
        }
    }
    cells
}

/// Random stratified split. Partition sizes are the rounded fractions of the
/// whole set, and every class contributes to each partition in proportion to
/// its size (within one sample).
pub fn split_dataset(labels: &[u32], fractions: [f64; 3], seed: u64) -> Result<Split> {
    validate_fractions(fractions)?;
    let n = labels.len();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let classes = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for (i, &l) in labels.iter().enumerate() {
        members[l as usize].push(i);
    }
    for (class, m) in members.iter().enumerate() {
        if !m.is_empty() && m.len() < 3 {
            return Err(Error::CannotStratify { class: class as u32, count: m.len() });
        }
    }
    let n_val = (n as f64 * fractions[1]).round() as usize;
    let n_test = (n as f64 * fractions[2]).round() as usize;
    if n_val + n_test >= n {
        return Err(Error::InvalidConfig(format!("{n} samples leave no training data")));
    }
    let counts: Vec<usize> = members.iter().map(Vec::len).collect();
    let table = round_table(&counts, [n - n_val - n_test, n_val, n_test], n);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split = Split {
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
    };
    for (c, mut m) in members.into_iter().enumerate() {
        m.shuffle(&mut rng);
        let [_, v, t] = table[c];
        split.val.extend_from_slice(&m[..v]);
        split.test.extend_from_slice(&m[v..v + t]);
        split.train.extend_from_slice(&m[v + t..]);
    }
    split.train.sort_unstable();
    split.val.sort_unstable();
    split.test.sort_unstable();
    Ok(split)
}

/// Group-held-out split: every group (for example a recording subject) lands
/// wholly in one partition. Group counts per partition are the rounded
/// fractions of the number of groups, each at least one.
pub fn split_by_group(groups: &[u32], fractions: [f64; 3], seed: u64) -> Result<Split> {
    validate_fractions(fractions)?;
    if groups.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut ids: Vec<u32> = groups.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let g = ids.len();
    if g < 3 {
        return Err(Error::InvalidConfig(format!("a group split needs at least 3 groups, got {g}")));
    }
    let n_val = ((g as f64 * fractions[1]).round() as usize).max(1);
    let n_test = ((g as f64 * fractions[2]).round() as usize).max(1);
    if n_val + n_test >= g {
        return Err(Error::InvalidConfig(format!("{g} groups leave none for training")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);
    let val_ids = &ids[..n_val];
    let test_ids = &ids[n_val..n_val + n_test];
    let mut split = Split {
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
    };
    for (i, gid) in groups.iter().enumerate() {
        if val_ids.contains(gid) {
            split.val.push(i);
        } else if test_ids.contains(gid) {
            split.test.push(i);
        } else {
            split.train.push(i);
        }
    }
    Ok(split)
}
