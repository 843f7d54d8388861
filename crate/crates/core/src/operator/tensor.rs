//! Dense row-major tensors and their plain-text format.
//!
//! The text format is a header line `<rank> <dims...>` followed by the row-major
//! values, one per line. `#` starts a comment.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<S> {
    dims: Vec<usize>,
    data: Vec<S>,
}

impl<S: Copy> Tensor<S> {
    pub fn new(dims: Vec<usize>, data: Vec<S>) -> Result<Self> {
        let size: usize = dims.iter().product();
        if size != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "dims {dims:?} need {size} values, got {}",
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn filled(dims: Vec<usize>, v: S) -> Self {
        let size = dims.iter().product();
        Self {
            dims,
            data: vec![v; size],
        }
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.dims.len(), "tensor index rank");
        idx.iter().zip(&self.dims).fold(0, |acc, (&i, &d)| {
            assert!(i < d, "tensor index out of range");
            acc * d + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> S {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: S) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn map<R: Copy>(&self, f: impl Fn(S) -> R) -> Tensor<R> {
        Tensor {
            dims: self.dims.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

impl<T: Real> Tensor<T> {
    pub fn to_complex(&self) -> Tensor<Complex<T>> {
        self.map(|v| Complex::new(v, T::zero()))
    }

    /// Parses the plain-text tensor format.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|f| f.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line: hline,
                msg: format!("bad header: {e}"),
            })?;
        let (&rank, dims) = nums.split_first().ok_or(Error::Parse {
            line: hline,
            msg: "empty header".into(),
        })?;
        if dims.len() != rank {
            return Err(Error::Parse {
                line: hline,
                msg: format!("rank {rank} but {} dims", dims.len()),
            });
        }
        let mut data = Vec::new();
        for (ln, l) in lines {
            for f in l.split_whitespace() {
                let v: f64 = f.parse().map_err(|_| Error::Parse {
                    line: ln,
                    msg: format!("bad value '{f}'"),
                })?;
                data.push(T::lit(v));
            }
        }
        Self::new(dims.to_vec(), data)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}", self.dims.len());
        for d in &self.dims {
            s.push_str(&format!(" {d}"));
        }
        s.push('\n');
        for v in &self.data {
            s.push_str(&format!("{v:e}\n"));
        }
        s
    }
}
