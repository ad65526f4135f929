//! Finite sets, total functions, systems and maps of systems.

mod func;
mod map;
mod set;
mod system;

pub use func::TotalFn;
pub use map::{MapCheck, ModelReport, SystemMap, TrivialModelCheck};
pub use set::{
    element_cap, pair_index, set_element_cap, split_pair, FinSet, DEFAULT_ELEMENT_CAP,
    UNIT_ELEMENT,
};
pub use system::{AttractionReport, StateSet, SubsystemWitness, System};
