//! WebAssembly bindings for a single-page demo. A [`Scene`] holds one
//! replicate; the page asks it for pictures, point lookups and walk
//! statistics.

use mtl_core::experiment::{build_replicate, centered_frame, Replicate};
use mtl_core::field::{Seed, StorageMode, WeightField};
use mtl_core::lpp::value_grid_default;
use mtl_core::render::{render_svg, RenderSpec};
use mtl_core::rescale::{index_to_volume, RescaledFrame, RescaledPoint};
use mtl_core::stats::{busemann_increment_test, Convention};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest box the page may request; keeps the wasm heap small.
pub const MAX_SIDE: u32 = 1024;

fn js_err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

#[wasm_bindgen]
pub struct Scene {
    side: u32,
    seed: u64,
    frame: RescaledFrame,
    replicate: Replicate,
}

#[wasm_bindgen]
impl Scene {
    /// Builds the tree, dual tree and curve of replicate 0 of `seed`, framed
    /// at the box center with scale `side / 4`.
    #[wasm_bindgen(constructor)]
    pub fn new(side: u32, seed: u64) -> Result<Scene, JsValue> {
        if !(16..=MAX_SIDE).contains(&side) {
            return Err(js_err(format!("side must be in [16, {MAX_SIDE}]")));
        }
        let frame = centered_frame(side, side as f64 / 4.0).map_err(js_err)?;
        let replicate =
            build_replicate(side, Seed::new(seed, 0), StorageMode::OnDemand, Some(frame.origin), true).map_err(js_err)?;
        Ok(Scene { side, seed, frame, replicate })
    }

    /// SVG of the window `|x| <= half_width`, `|t| <= half_width / 2` with the
    /// curve drawn over volumes `[v1, v2]`.
    pub fn svg(&self, half_width: f64, v1: f64, v2: f64, width: u32) -> Result<String, JsValue> {
        let spec = RenderSpec {
            x_range: (-half_width, half_width),
            t_range: (-half_width / 2.0, half_width / 2.0),
            volume: Some((v1, v2)),
            width,
        };
        let (dual, curve) = self.parts();
        render_svg(&self.frame, &self.replicate.forest, dual, curve, &spec)
            .map(|(svg, _)| svg)
            .map_err(js_err)
    }

    /// The lattice cell under rescaled point `(x, t)` and its curve volume,
    /// as JSON.
    pub fn locate(&self, x: f64, t: f64) -> Result<String, JsValue> {
        let v = self.frame.to_lattice(RescaledPoint::new(x, t)).map_err(js_err)?;
        let (_, curve) = self.parts();
        let index = curve.curve_index(v).map_err(js_err)?;
        Ok(json!({
            "i": v.i,
            "j": v.j,
            "index": index,
            "volume": index_to_volume(&self.frame, index),
        })
        .to_string())
    }

    /// Statistics of the Busemann increments along the middle anti-diagonal
    /// of a fresh field with the same seed, as JSON.
    pub fn busemann(&self) -> Result<String, JsValue> {
        let field = WeightField::on_demand(self.side, Seed::new(self.seed, 0)).map_err(js_err)?;
        let grid = value_grid_default(&field);
        let level = self.side;
        let half = (self.side / 4).max(50);
        let range = (level / 2 - half, level / 2 + half - 1);
        let s = busemann_increment_test(&field, &grid, level, range, Convention::IncludeFirst).map_err(js_err)?;
        serde_json::to_string(&s).map_err(js_err)
    }
}

impl Scene {
    fn parts(&self) -> (&mtl_core::forest::DualForest, &mtl_core::peano::PeanoCurve) {
        (
            self.replicate.dual.as_ref().expect("scene keeps its dual"),
            self.replicate.curve.as_ref().expect("scene keeps its curve"),
        )
    }
}
