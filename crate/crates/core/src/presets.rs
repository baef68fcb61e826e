//! Named test spaces used by the experiment harness.
//!
//! All endpoints and breakpoints are exactly representable doubles, so the
//! inputs carry no rounding and the oracle sees the same space.

use crate::error::{Error, Result};
use crate::spaces::MDSpace;

/// A space with the points and function probed by the experiments.
#[derive(Clone, Debug)]
pub struct Preset {
    pub name: String,
    pub space: MDSpace,
    /// 1-based index of the function whose values are reported.
    pub function: usize,
    pub points: Vec<f64>,
}

pub const NAMES: &[&str] = &[
    "cox", "test1", "test2", "test3", "test4", "test5", "test6", "table7", "join-demo", "elevation-demo",
];

/// Continuities used by the `table7` family.
pub const TABLE7_K1: &[i64] = &[5, 7, 9, 11, 13, 15, 17, 19];

fn space(a: f64, b: f64, x: Vec<f64>, d: Vec<i64>, k: Vec<i64>) -> MDSpace {
    MDSpace::new(a, b, x, d, k).expect("preset spaces are valid")
}

/// Degree 21, `C^20`, unit breakpoints on `[0, 22]`.
pub fn cox() -> Preset {
    let x: Vec<f64> = (1..=21).map(f64::from).collect();
    Preset {
        name: "cox".into(),
        space: space(0.0, 22.0, x.clone(), vec![21; 22], vec![20; 21]),
        function: 22,
        points: x,
    }
}

fn near_coincident(d: Vec<i64>, k: Vec<i64>) -> MDSpace {
    space(-10000.0, 10000.0, vec![-9999.0, 0.0, 9999.0], d, k)
}

fn powers_of_two() -> Vec<f64> {
    (1..=9).map(|j| f64::from(1 << j)).collect()
}

fn central(name: &str, space: MDSpace) -> Preset {
    Preset {
        name: name.into(),
        function: space.dim().div_ceil(2),
        points: space.breakpoints.clone(),
        space,
    }
}

pub fn test1() -> Preset {
    Preset {
        function: 5,
        ..central("test1", near_coincident(vec![5, 3, 3, 5], vec![3, 2, 3]))
    }
}

pub fn test2() -> Preset {
    Preset {
        function: 4,
        ..central("test2", near_coincident(vec![3, 5, 5, 3], vec![3, 4, 3]))
    }
}

fn test34_degrees() -> (Vec<i64>, Vec<i64>) {
    (vec![9, 9, 10, 10, 9, 9, 10, 10, 9, 9], vec![8, 9, 9, 9, 8, 9, 9, 9, 8])
}

pub fn test3() -> Preset {
    let (d, k) = test34_degrees();
    Preset {
        function: 9,
        ..central("test3", space(1.0, 1024.0, powers_of_two(), d, k))
    }
}

pub fn test4() -> Preset {
    let (d, k) = test34_degrees();
    let x: Vec<f64> = (1..=9).map(|j| -f64::from(1 << (10 - j))).collect();
    central("test4", space(-1024.0, 1.0, x, d, k))
}

pub fn test5() -> Preset {
    let d: Vec<i64> = (0..=21)
        .map(|i| match i {
            10 | 11 => 19,
            5..=9 | 12..=16 => 20,
            _ => 21,
        })
        .collect();
    let k: Vec<i64> = (1..=21)
        .map(|i| match i {
            11 | 12 => 18,
            6..=10 | 13..=17 => 19,
            _ => 20,
        })
        .collect();
    let x: Vec<f64> = (1..=21).map(f64::from).collect();
    central("test5", space(0.0, 22.0, x, d, k))
}

pub fn test6() -> Preset {
    central("test6", near_coincident(vec![21, 19, 19, 21], vec![15, 10, 15]))
}

/// Two intervals on `[0, 2]` with degrees 19 and 20 and continuity `k1` at 1.
pub fn table7(k1: i64) -> Preset {
    central(&format!("table7-k{k1}"), space(0.0, 2.0, vec![1.0], vec![19, 20], vec![k1]))
}

/// Four intervals with three degree changes, joined with `C^3` and `C^2`.
pub fn join_demo() -> Preset {
    central("join-demo", space(0.0, 4.0, vec![1.0, 2.0, 3.0], vec![2, 2, 4, 3], vec![1, 2, 3]))
}

/// Three intervals of degrees 4, 2, 3 built by degree elevation.
pub fn elevation_demo() -> Preset {
    central("elevation-demo", space(0.0, 3.0, vec![1.0, 2.0], vec![4, 2, 3], vec![2, 1]))
}

/// All spaces behind a preset name. `table7` expands to its family; single
/// members are named `table7-k5` and so on.
pub fn lookup(name: &str) -> Result<Vec<Preset>> {
    Ok(match name {
        "cox" => vec![cox()],
        "test1" => vec![test1()],
        "test2" => vec![test2()],
        "test3" => vec![test3()],
        "test4" => vec![test4()],
        "test5" => vec![test5()],
        "test6" => vec![test6()],
        "table7" => TABLE7_K1.iter().map(|&k| table7(k)).collect(),
        "join-demo" => vec![join_demo()],
        "elevation-demo" => vec![elevation_demo()],
        _ if name.starts_with("table7-k") => {
            match name["table7-k".len()..].parse::<i64>() {
                Ok(k) if TABLE7_K1.contains(&k) => vec![table7(k)],
                _ => return Err(Error::Input(format!("unknown preset `{name}`"))),
            }
        }
        _ => {
            return Err(Error::Input(format!(
                "unknown preset `{name}` (known: {})",
                NAMES.join(", ")
            )))
        }
    })
}

/// The six near-production test spaces.
pub fn test_spaces() -> Vec<Preset> {
    vec![test1(), test2(), test3(), test4(), test5(), test6()]
}
