use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signals::io::{to_json_text, write_atomic};
use crate::signals::{ComplexField2D, Hbar, UniformGrid1D};

const FILES: [&str; 5] = [
    "slice_b0_r0.csv",
    "slice_b+h_r0.csv",
    "slice_b-h_r0.csv",
    "slice_b0_r+h.csv",
    "slice_b0_r-h.csv",
];
const META: &str = "meta.json";
const HALF_DIR: &str = "half";

/// Central slice `(b₀, r₀)` with neighbours at `b₀ ± h_b` and `r₀ ± h_r`,
/// optionally carrying a second stack at half the steps for convergence
/// checks.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceStack {
    b0: f64,
    r0: f64,
    h_b: f64,
    h_r: f64,
    /// centre, b+, b−, r+, r−
    slices: [ComplexField2D; 5],
    half: Option<Box<SliceStack>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StackGrids {
    pub x: UniformGrid1D,
    pub y: UniformGrid1D,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StackMeta {
    pub b0: f64,
    pub r0: f64,
    pub h_b: f64,
    pub h_r: f64,
    pub hbar: Hbar,
    pub grids: StackGrids,
}

impl SliceStack {
    /// Slice parameters in storage order: centre, b+, b−, r+, r−.
    pub fn stencil(b0: f64, r0: f64, h_b: f64, h_r: f64) -> [(f64, f64); 5] {
        [(b0, r0), (b0 + h_b, r0), (b0 - h_b, r0), (b0, r0 + h_r), (b0, r0 - h_r)]
    }

    pub fn new(b0: f64, r0: f64, h_b: f64, h_r: f64, slices: [ComplexField2D; 5]) -> Result<Self> {
        if !(h_b > 0.0 && h_r > 0.0) {
            return Err(Error::InvalidGrid(format!("stencil steps must be positive, got h_b={h_b}, h_r={h_r}")));
        }
        if !(r0 - h_r > 0.0) {
            return Err(Error::NonPositiveSqueeze(r0 - h_r));
        }
        let c = &slices[0];
        for (s, (b, r)) in slices.iter().zip(Self::stencil(b0, r0, h_b, h_r)) {
            if !s.same_slice(b, r) {
                return Err(Error::MissingSlice { b, r });
            }
            if !s.same_grids(c) || s.hbar() != c.hbar() {
                return Err(Error::GridMismatch(format!("slice (b={b}, r={r}) differs from the centre")));
            }
        }
        Ok(Self { b0, r0, h_b, h_r, slices, half: None })
    }

    /// Builds the five slices from `provider(b, r)`.
    pub fn from_provider<P>(provider: P, b0: f64, r0: f64, h_b: f64, h_r: f64) -> Result<Self>
    where
        P: Fn(f64, f64) -> Result<ComplexField2D>,
    {
        let st = Self::stencil(b0, r0, h_b, h_r);
        let slices = [
            provider(st[0].0, st[0].1)?,
            provider(st[1].0, st[1].1)?,
            provider(st[2].0, st[2].1)?,
            provider(st[3].0, st[3].1)?,
            provider(st[4].0, st[4].1)?,
        ];
        Self::new(b0, r0, h_b, h_r, slices)
    }

    /// Same as [`Self::from_provider`] plus the half-step stack.
    pub fn with_half<P>(provider: P, b0: f64, r0: f64, h_b: f64, h_r: f64) -> Result<Self>
    where
        P: Fn(f64, f64) -> Result<ComplexField2D>,
    {
        let half = Self::from_provider(&provider, b0, r0, h_b / 2.0, h_r / 2.0)?;
        let mut full = Self::from_provider(&provider, b0, r0, h_b, h_r)?;
        full.attach_half(half)?;
        Ok(full)
    }

    pub fn attach_half(&mut self, half: SliceStack) -> Result<()> {
        if !half.centre().same_grids(self.centre()) || half.b0 != self.b0 || half.r0 != self.r0 {
            return Err(Error::GridMismatch("half-step stack does not match".into()));
        }
        self.half = Some(Box::new(half));
        Ok(())
    }

    pub fn half(&self) -> Option<&SliceStack> {
        self.half.as_deref()
    }

    pub fn b0(&self) -> f64 {
        self.b0
    }
    pub fn r0(&self) -> f64 {
        self.r0
    }
    pub fn h_b(&self) -> f64 {
        self.h_b
    }
    pub fn h_r(&self) -> f64 {
        self.h_r
    }
    pub fn hbar(&self) -> Hbar {
        self.slices[0].hbar()
    }
    pub fn slices(&self) -> &[ComplexField2D; 5] {
        &self.slices
    }
    pub fn centre(&self) -> &ComplexField2D {
        &self.slices[0]
    }
    pub fn b_plus(&self) -> &ComplexField2D {
        &self.slices[1]
    }
    pub fn b_minus(&self) -> &ComplexField2D {
        &self.slices[2]
    }
    pub fn r_plus(&self) -> &ComplexField2D {
        &self.slices[3]
    }
    pub fn r_minus(&self) -> &ComplexField2D {
        &self.slices[4]
    }

    /// Applies `op` to every slice, including the half stack.
    pub fn map_slices<F>(&self, op: &F) -> Result<Self>
    where
        F: Fn(&ComplexField2D) -> Result<ComplexField2D>,
    {
        let s = &self.slices;
        let slices = [op(&s[0])?, op(&s[1])?, op(&s[2])?, op(&s[3])?, op(&s[4])?];
        let mut out = Self::new(self.b0, self.r0, self.h_b, self.h_r, slices)?;
        if let Some(h) = &self.half {
            out.half = Some(Box::new(h.map_slices(op)?));
        }
        Ok(out)
    }

    pub fn meta(&self) -> StackMeta {
        StackMeta {
            b0: self.b0,
            r0: self.r0,
            h_b: self.h_b,
            h_r: self.h_r,
            hbar: self.hbar(),
            grids: StackGrids { x: *self.centre().x_grid(), y: *self.centre().y_grid() },
        }
    }

    /// Five CSVs plus `meta.json`; the half stack goes to `half/`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, slice) in FILES.iter().zip(&self.slices) {
            write_atomic(&dir.join(name), slice.to_csv().as_bytes())?;
        }
        let meta = to_json_text(&self.meta())?;
        write_atomic(&dir.join(META), meta.as_bytes())?;
        if let Some(h) = &self.half {
            h.write_dir(&dir.join(HALF_DIR))?;
        }
        Ok(())
    }

    pub fn read_dir(dir: &Path) -> Result<Self> {
        let meta_path = dir.join(META);
        let text = std::fs::read_to_string(&meta_path)
            .map_err(|e| Error::Parse(format!("{}: {e}", meta_path.display())))?;
        let meta: StackMeta =
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", meta_path.display())))?;
        let st = Self::stencil(meta.b0, meta.r0, meta.h_b, meta.h_r);
        let mut fields = Vec::with_capacity(5);
        for (name, (b, r)) in FILES.iter().zip(st) {
            let path = dir.join(name);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            let f = ComplexField2D::from_csv(&text, b, r, meta.hbar)?;
            if !f.x_grid().same_as(&meta.grids.x) || !f.y_grid().same_as(&meta.grids.y) {
                return Err(Error::GridMismatch(format!("{} disagrees with meta.json grids", path.display())));
            }
            fields.push(f);
        }
        let slices: [ComplexField2D; 5] = fields.try_into().expect("five slices");
        let mut stack = Self::new(meta.b0, meta.r0, meta.h_b, meta.h_r, slices)?;
        let half = dir.join(HALF_DIR);
        if half.join(META).exists() {
            stack.attach_half(Self::read_dir(&half)?)?;
        }
        Ok(stack)
    }
}
