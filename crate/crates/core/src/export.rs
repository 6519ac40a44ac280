//! CSV and SVG writers for grid evaluations.

use std::fmt::Write as _;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cantor::CantorState;
use crate::hull::{eval_sheet, SheetSample};
use crate::product::{eval_f, eval_g};
use crate::witness::{eval_witness, WitnessFunction};

/// Uniform `nx × ny` grid over a closed rectangle, row-major in `im`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub re: [f64; 2],
    pub im: [f64; 2],
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(re: [f64; 2], im: [f64; 2], nx: usize, ny: usize) -> Self {
        GridSpec { re, im, nx, ny }
    }

    /// Square grid centered at `center` with half-width `half`.
    pub fn around(center: Complex64, half: f64, n: usize) -> Self {
        GridSpec::new(
            [center.re - half, center.re + half],
            [center.im - half, center.im + half],
            n,
            n,
        )
    }

    fn coord(lo: f64, hi: f64, k: usize, n: usize) -> f64 {
        if n <= 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * k as f64 / (n - 1) as f64
        }
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(
            Self::coord(self.re[0], self.re[1], i, self.nx),
            Self::coord(self.im[0], self.im[1], j, self.ny),
        )
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| self.point(i, j)))
    }
}

/// `re,im,g_re,g_im,f_re,f_im,parity`; points on cuts or poles are skipped.
/// Returns the number of rows written.
pub fn write_product_csv<W: Write>(
    state: &CantorState,
    n: usize,
    grid: &GridSpec,
    mut out: W,
) -> std::io::Result<usize> {
    writeln!(out, "re,im,g_re,g_im,f_re,f_im,parity")?;
    let mut rows = 0;
    for z in grid.points() {
        if let (Ok(g), Ok(f)) = (eval_g(state, n, z), eval_f(state, n, z)) {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                z.re, z.im, g.re, g.im, f.value.re, f.value.im, f.sheet_parity
            )?;
            rows += 1;
        }
    }
    Ok(rows)
}

/// `re,im,s_re,s_im` for the sheet function; excluded points are skipped.
pub fn write_sheet_csv<W: Write>(
    state: &CantorState,
    n: usize,
    grid: &GridSpec,
    mut out: W,
) -> std::io::Result<usize> {
    writeln!(out, "re,im,s_re,s_im")?;
    let mut rows = 0;
    for z in grid.points() {
        if let Ok(s) = eval_sheet(state, n, z) {
            writeln!(out, "{},{},{},{}", z.re, z.im, s.re, s.im)?;
            rows += 1;
        }
    }
    Ok(rows)
}

/// `z_re,z_im,wp_re,wp_im,wm_re,wm_im`.
pub fn write_cover_csv<W: Write>(samples: &[SheetSample], mut out: W) -> std::io::Result<()> {
    writeln!(out, "z_re,z_im,wp_re,wp_im,wm_re,wm_im")?;
    for s in samples {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            s.z.re, s.z.im, s.w_plus.re, s.w_plus.im, s.w_minus.re, s.w_minus.im
        )?;
    }
    Ok(())
}

/// `z_re,z_im,w_re,w_im,v` over the product of a `z` grid and a `w` grid.
pub fn write_witness_csv<W: Write>(
    wf: &WitnessFunction,
    z_grid: &GridSpec,
    w_grid: &GridSpec,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "z_re,z_im,w_re,w_im,v")?;
    for z in z_grid.points() {
        for w in w_grid.points() {
            let v = eval_witness(wf, z, w);
            writeln!(out, "{},{},{},{},{}", z.re, z.im, w.re, w.im, v)?;
        }
    }
    Ok(())
}

fn ramp(t: f64) -> (u8, u8, u8) {
    // dark blue -> white -> dark red
    let t = t.clamp(0.0, 1.0);
    let (r, g, b) = if t < 0.5 {
        let s = t / 0.5;
        (40.0 + 215.0 * s, 60.0 + 195.0 * s, 150.0 + 105.0 * s)
    } else {
        let s = (t - 0.5) / 0.5;
        (255.0 - 75.0 * s, 255.0 - 215.0 * s, 255.0 - 215.0 * s)
    };
    (r as u8, g as u8, b as u8)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Heat map of `values[j * nx + i]`; non-finite cells are left blank.
pub fn svg_heatmap(grid: &GridSpec, values: &[f64], title: &str) -> String {
    let cell = 4usize;
    let (w, h) = (grid.nx * cell, grid.ny * cell + 20);
    let finite = values.iter().copied().filter(|v| v.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">
<title>{}</title>
<text x="2" y="14" font-family="monospace" font-size="11">{} [{lo:.4e}, {hi:.4e}]</text>"#,
        escape(title),
        escape(title)
    );
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let v = values[j * grid.nx + i];
            if !v.is_finite() {
                continue;
            }
            let (r, g, b) = ramp((v - lo) / span);
            let y = 20 + (grid.ny - 1 - j) * cell;
            let _ = writeln!(
                svg,
                r#"<rect x="{}" y="{y}" width="{cell}" height="{cell}" fill="rgb({r},{g},{b})"/>"#,
                i * cell
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}
