use num_complex::Complex;

use crate::scalar::Scalar;

/// Direct O(N²) DFT, `X[k] = Σ x[n] exp(-2πi kn/N)`.
///
/// Twiddles are tabulated once and indexed by `kn mod N`, so the phase never
/// accumulates rounding from large products. Reference implementation for
/// [`fft`].
pub fn dft_naive<T: Scalar>(signal: &[T]) -> Vec<Complex<T>> {
    let n = signal.len();
    let table = twiddles::<T>(n, n);
    (0..n)
        .map(|k| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (j, &x) in signal.iter().enumerate() {
                acc += table[(k * j) % n] * x;
            }
            acc
        })
        .collect()
}

/// Forward DFT of a real signal of any nonzero length.
pub fn fft<T: Scalar>(signal: &[T]) -> Vec<Complex<T>> {
    let plan = FftPlan::new(signal.len());
    let mut buf: Vec<Complex<T>> = signal.iter().map(|&x| Complex::new(x, T::zero())).collect();
    plan.process(&mut buf);
    buf
}

/// Precomputed forward transform for one length.
///
/// Powers of two use an iterative radix-2 Cooley–Tukey pass. Other lengths go
/// through Bluestein's chirp-z identity, which rewrites the DFT as a circular
/// convolution evaluated with a power-of-two transform of length ≥ 2N − 1.
#[derive(Debug, Clone)]
pub struct FftPlan<T> {
    len: usize,
    kind: PlanKind<T>,
}

#[derive(Debug, Clone)]
enum PlanKind<T> {
    Radix2(Radix2<T>),
    Bluestein {
        inner: Radix2<T>,
        /// `exp(-iπ n²/N)` for `n < N`
        chirp: Vec<Complex<T>>,
        /// transform of the conjugate chirp, wrapped to the inner length
        kernel: Vec<Complex<T>>,
    },
}

impl<T: Scalar> FftPlan<T> {
    /// # Panics
    ///
    /// Panics if `len` is zero.
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "fft length must be nonzero");
        if len.is_power_of_two() {
            return FftPlan {
                len,
                kind: PlanKind::Radix2(Radix2::new(len)),
            };
        }
        let m = (2 * len - 1).next_power_of_two();
        let inner = Radix2::new(m);
        // exp(-iπ n²/N) = exp(-2πi (n² mod 2N) / 2N)
        let two_n = 2 * len;
        let chirp: Vec<Complex<T>> = (0..len)
            .map(|n| {
                let r = ((n as u128 * n as u128) % two_n as u128) as f64;
                let angle = -std::f64::consts::PI * r / len as f64;
                Complex::new(T::of(angle.cos()), T::of(angle.sin()))
            })
            .collect();
        let mut kernel = vec![Complex::new(T::zero(), T::zero()); m];
        kernel[0] = chirp[0].conj();
        for n in 1..len {
            kernel[n] = chirp[n].conj();
            kernel[m - n] = chirp[n].conj();
        }
        inner.process(&mut kernel);
        FftPlan {
            len,
            kind: PlanKind::Bluestein { inner, chirp, kernel },
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// In-place forward transform.
    ///
    /// # Panics
    ///
    /// Panics if `buf.len()` differs from the planned length.
    pub fn process(&self, buf: &mut [Complex<T>]) {
        assert_eq!(buf.len(), self.len, "buffer length does not match plan");
        match &self.kind {
            PlanKind::Radix2(r) => r.process(buf),
            PlanKind::Bluestein { inner, chirp, kernel } => {
                let m = kernel.len();
                let mut work = vec![Complex::new(T::zero(), T::zero()); m];
                for ((w, &x), &c) in work.iter_mut().zip(buf.iter()).zip(chirp) {
                    *w = x * c;
                }
                inner.process(&mut work);
                for (w, &k) in work.iter_mut().zip(kernel) {
                    *w = (*w * k).conj();
                }
                // inverse via conjugation: ifft(v) = conj(fft(conj(v))) / m
                inner.process(&mut work);
                let scale = T::one() / T::of_usize(m);
                for ((out, w), &c) in buf.iter_mut().zip(&work).zip(chirp) {
                    *out = w.conj() * scale * c;
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Radix2<T> {
    len: usize,
    /// `exp(-2πi j/len)` for `j < len/2`
    twiddles: Vec<Complex<T>>,
}

impl<T: Scalar> Radix2<T> {
    fn new(len: usize) -> Self {
        debug_assert!(len.is_power_of_two());
        Radix2 {
            len,
            twiddles: twiddles(len, len / 2),
        }
    }

    fn process(&self, buf: &mut [Complex<T>]) {
        let n = self.len;
        if n <= 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let stride = n / size;
            for start in (0..n).step_by(size) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            size *= 2;
        }
    }
}

/// `exp(-2πi j/n)` for `j < count`, evaluated in f64.
fn twiddles<T: Scalar>(n: usize, count: usize) -> Vec<Complex<T>> {
    (0..count)
        .map(|j| {
            let angle = -std::f64::consts::TAU * j as f64 / n as f64;
            Complex::new(T::of(angle.cos()), T::of(angle.sin()))
        })
        .collect()
}
