// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Corpus files, the built-in five-product example and synthetic ecosystems.

mod format;
mod synthetic;

pub use format::{load_ecosystem, save_ecosystem, CorpusError};
pub use synthetic::{generate_synthetic, GeneratorParams, InvalidParams};

use crate::model::Ecosystem;

/// Corpus text of the built-in example (`fixtures/fig1.json`).
pub const FIG1_CORPUS: &str = include_str!("../../fixtures/fig1.json");

/// The eight-revision example ecosystem over products A, B, C, D and E.
///
/// Dependencies:
///
/// ```text
/// C-1.0: {A =1.1} and {B <=1.0 || >=1.3}
/// C-1.4: {A =1.1 or B >=1.3}
/// D-1.0: {B >=1.1} and {E >=1.0} and {C * or A =1.0}
/// E-1.0: {A *}
/// A-1.0, A-1.1, B-1.0, B-1.3: none
/// ```
///
/// E-1.0's dependency is inferred from its call `E/f4 -> A/f1`; the rest is
/// stated outright. Call graphs are the smallest ones consistent with the
/// reachability facts of the example: C-1.0's externals `y1` and `y2` map to
/// `{B-1.3:f1, B-1.0:f3}` and `{A-1.1:f3}`, C-1.4 calls `B/f2` from `f1` and
/// `A/f2` from `f3`, D-1.0's `f1` calls `C/f2`, `B/f1` and `E/f4`.
pub fn fixture_fig1() -> Ecosystem {
    load_ecosystem(FIG1_CORPUS.as_bytes()).expect("built-in fixture is valid")
}
