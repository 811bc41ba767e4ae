//! Scalar abstraction over `f32`/`f64` and a bounds-checked GEMM wrapper.

use core::fmt::Debug;
use core::iter::Sum;

use num_traits::Float;

/// Floating-point type the network is generic over. Training uses `f32`;
/// gradient checks use `f64`.
pub trait Real: Float + Default + Debug + Sum + Send + Sync + 'static {
    fn of(x: f64) -> Self;
    fn f64(self) -> f64;

    /// # Safety
    /// Same contract as `matrixmultiply::sgemm`/`dgemm`.
    #[allow(clippy::too_many_arguments)]
    unsafe fn gemm_raw(
        m: usize,
        k: usize,
        n: usize,
        alpha: Self,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
        rsc: isize,
        csc: isize,
    );
}

impl Real for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn f64(self) -> f64 {
        self as f64
    }
    unsafe fn gemm_raw(
        m: usize,
        k: usize,
        n: usize,
        alpha: Self,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
        rsc: isize,
        csc: isize,
    ) {
        matrixmultiply::sgemm(m, k, n, alpha, a, rsa, csa, b, rsb, csb, beta, c, rsc, csc)
    }
}

impl Real for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }
    #[inline]
    fn f64(self) -> f64 {
        self
    }
    unsafe fn gemm_raw(
        m: usize,
        k: usize,
        n: usize,
        alpha: Self,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
        rsc: isize,
        csc: isize,
    ) {
        matrixmultiply::dgemm(m, k, n, alpha, a, rsa, csa, b, rsb, csb, beta, c, rsc, csc)
    }
}

/// A strided 2-D window into a flat buffer.
#[derive(Debug, Clone, Copy)]
pub(crate) struct View {
    pub off: usize,
    pub rows: usize,
    pub cols: usize,
    pub rs: usize,
    pub cs: usize,
}

impl View {
    /// Dense row-major matrix.
    pub fn dense(rows: usize, cols: usize) -> Self {
        View { off: 0, rows, cols, rs: cols, cs: 1 }
    }

    /// Column block `[c0, c0 + cols)` of rows `[r0, r0 + rows)` of a dense
    /// matrix with `width` columns.
    pub fn block(width: usize, r0: usize, rows: usize, c0: usize, cols: usize) -> Self {
        View { off: r0 * width + c0, rows, cols, rs: width, cs: 1 }
    }

    pub fn t(self) -> Self {
        View { rows: self.cols, cols: self.rows, rs: self.cs, cs: self.rs, ..self }
    }

    fn fits(&self, len: usize) -> bool {
        self.rows == 0 || self.cols == 0 || self.off + (self.rows - 1) * self.rs + (self.cols - 1) * self.cs < len
    }
}

/// `c = alpha * a * b + beta * c` over views.
pub(crate) fn gemm<T: Real>(alpha: T, a: &[T], av: View, b: &[T], bv: View, beta: T, c: &mut [T], cv: View) {
    assert!(av.cols == bv.rows && av.rows == cv.rows && bv.cols == cv.cols, "gemm shape");
    assert!(av.fits(a.len()) && bv.fits(b.len()) && cv.fits(c.len()), "gemm bounds");
    if cv.rows == 0 || cv.cols == 0 {
        return;
    }
    if av.cols == 0 {
        for i in 0..cv.rows {
            for j in 0..cv.cols {
                let p = cv.off + i * cv.rs + j * cv.cs;
                c[p] = if beta == T::zero() { T::zero() } else { beta * c[p] };
            }
        }
        return;
    }
    // SAFETY: every view was bounds-checked against its buffer above, and `c`
    // is borrowed mutably so it cannot alias `a` or `b`.
    unsafe {
        T::gemm_raw(
            av.rows,
            av.cols,
            bv.cols,
            alpha,
            a.as_ptr().add(av.off),
            av.rs as isize,
            av.cs as isize,
            b.as_ptr().add(bv.off),
            bv.rs as isize,
            bv.cs as isize,
            beta,
            c.as_mut_ptr().add(cv.off),
            cv.rs as isize,
            cv.cs as isize,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn matches_naive_product_with_transposes() {
        let a: [f64; 6] = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]; // 2x3
        let b: [f64; 6] = [1.0, -1.0, 0.5, 2.0, 0.0, 1.0]; // 3x2
        let mut c = vec![0.0; 4];
        gemm(1.0, &a, View::dense(2, 3), &b, View::dense(3, 2), 0.0, &mut c, View::dense(2, 2));
        assert_eq!(c, [2.0, 6.0, 6.5, 12.0]);
        // a^T a is 3x3
        let mut g = vec![0.0; 9];
        gemm(1.0, &a, View::dense(2, 3).t(), &a, View::dense(2, 3), 0.0, &mut g, View::dense(3, 3));
        assert_eq!(g, [17.0, 22.0, 27.0, 22.0, 29.0, 36.0, 27.0, 36.0, 45.0]);
    }

    #[test]
    fn accumulates_into_block() {
        let a = [1.0f32, 2.0];
        let b = [3.0f32, 4.0];
        let mut c = vec![1.0f32; 6];
        // outer product into rows 1..3, cols 1..3 of a 3x3 buffer
        let mut c9 = vec![0.0f32; 9];
        gemm(1.0, &a, View::dense(2, 1), &b, View::dense(1, 2), 1.0, &mut c9, View::block(3, 1, 2, 1, 2));
        assert_eq!(c9, [0.0, 0.0, 0.0, 0.0, 3.0, 4.0, 0.0, 6.0, 8.0]);
        gemm(2.0, &a, View::dense(2, 1), &b, View::dense(1, 2), 1.0, &mut c, View::block(3, 0, 2, 0, 2));
        assert_eq!(c, [7.0, 9.0, 1.0, 13.0, 17.0, 1.0]);
    }
}
