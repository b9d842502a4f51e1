//! Shipped species and a registry building them by name.

pub mod basic;
pub mod pairs;
pub mod parking;
pub mod perm;

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::avoidance;
use crate::species::{Instance, InstanceRef, SpeciesError};

/// Knobs shared by the parametrized instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Params {
    pub palette: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params { palette: 2 }
    }
}

pub const NAMES: &[&str] = &[
    "colored",
    "tensor",
    "graphs",
    "posets",
    "preorders",
    "perm_f",
    "perm_m",
    "parking",
    "cc",
    "nc",
    "nn",
    "packed_words",
    "broken_dc",
    "broken_parity",
];

/// Build an instance. Names of the form `base/preset` restrict `base` to
/// the elements avoiding the preset pattern set.
pub fn build_instance(name: &str, params: &Params) -> Result<InstanceRef, SpeciesError> {
    if params.palette == 0 || params.palette > 255 {
        return Err(SpeciesError::BadParameter(format!("palette size {} not in 1..=255", params.palette)));
    }
    if let Some((base, preset)) = name.split_once('/') {
        let parent = instance(base, params)?;
        return avoidance::avoiding_instance(parent, preset)
            .map_err(|e| SpeciesError::BadParameter(e.to_string()));
    }
    let palette = params.palette;
    Ok(match name {
        "colored" => Instance::new(basic::Colored { palette }),
        "tensor" => Instance::new(basic::Tensor { palette }),
        "graphs" => Instance::new(basic::Graphs),
        "posets" => Instance::new(basic::Orders { posets_only: true }),
        "preorders" => Instance::new(basic::Orders { posets_only: false }),
        "perm_f" => Instance::new(perm::PermF),
        "perm_m" => Instance::new(perm::PermM),
        "parking" => Instance::new(parking::Parking),
        "cc" => Instance::new(pairs::Pairs { kind: pairs::PairKind::Cc }),
        "nc" => Instance::new(pairs::Pairs { kind: pairs::PairKind::Nc }),
        "nn" => Instance::new(pairs::Pairs { kind: pairs::PairKind::Nn }),
        "packed_words" => Instance::new(pairs::PackedWords),
        "broken_dc" => Instance::new(basic::BrokenDc { palette }),
        "broken_parity" => Instance::new(basic::BrokenParity { palette }),
        _ => return Err(SpeciesError::UnknownInstance(name.into())),
    })
}

/// Like [`build_instance`], but shares one instance (and its element cache)
/// per name and parameters within the process.
pub fn instance(name: &str, params: &Params) -> Result<InstanceRef, SpeciesError> {
    static REGISTRY: OnceLock<Mutex<HashMap<(String, Params), InstanceRef>>> = OnceLock::new();
    let registry = REGISTRY.get_or_init(Default::default);
    let key = (name.to_string(), *params);
    if let Some(inst) = registry.lock().expect("registry lock").get(&key) {
        return Ok(inst.clone());
    }
    let inst = build_instance(name, params)?;
    Ok(registry.lock().expect("registry lock").entry(key).or_insert(inst).clone())
}
