//! Simplified execution-cache-memory model for the block kernels.
//!
//! A kernel is characterised by its flop count `ω`, the scalars `β` it moves
//! from main memory and the scalars `τ` it moves between L1 and registers.
//! The predicted runtime is `T = max(ω / peak, 8β / mem_bw, 8τ / reg_bw)`.
//! L1 capacity effects are not modelled.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    Bdot,
    Baxpy,
    Bop,
}

impl Kernel {
    pub const ALL: [Kernel; 3] = [Kernel::Bdot, Kernel::Baxpy, Kernel::Bop];
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kernel::Bdot => "bdot",
            Kernel::Baxpy => "baxpy",
            Kernel::Bop => "bop",
        })
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bdot" => Ok(Kernel::Bdot),
            "baxpy" => Ok(Kernel::Baxpy),
            "bop" => Ok(Kernel::Bop),
            other => Err(Error::config(format!("unknown kernel '{other}'"))),
        }
    }
}

/// Hardware throughput figures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MachineProfile {
    /// flop/s
    pub peak_flops: f64,
    /// byte/s, main memory
    pub mem_bandwidth: f64,
    /// byte/s, L1 ↔ registers
    pub reg_bandwidth: f64,
    pub bytes_per_scalar: f64,
}

impl MachineProfile {
    pub fn new(peak_flops: f64, mem_bandwidth: f64, reg_bandwidth: f64) -> Result<Self> {
        let m = Self {
            peak_flops,
            mem_bandwidth,
            reg_bandwidth,
            bytes_per_scalar: 8.0,
        };
        m.validate()?;
        Ok(m)
    }

    /// Single core Skylake-SP reference: 76.8 Gflop/s, 13.345 GB/s memory,
    /// 286.1 GB/s register bandwidth.
    pub fn skylake_reference() -> Self {
        Self {
            peak_flops: 76.8e9,
            mem_bandwidth: 13.345e9,
            reg_bandwidth: 286.1e9,
            bytes_per_scalar: 8.0,
        }
    }

    fn validate(&self) -> Result<()> {
        let fields = [
            ("peak_flops", self.peak_flops),
            ("mem_bandwidth", self.mem_bandwidth),
            ("reg_bandwidth", self.reg_bandwidth),
            ("bytes_per_scalar", self.bytes_per_scalar),
        ];
        for (name, v) in fields {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Parses `key=value` lines (`#` comments and blank lines allowed).
    /// `peak_flops`, `mem_bandwidth` and `reg_bandwidth` are required.
    pub fn parse(text: &str) -> Result<Self> {
        let (mut peak, mut mem, mut reg, mut bytes) = (None, None, None, None);
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(idx + 1, "expected key=value"))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::parse(idx + 1, format!("bad number '{}'", value.trim())))?;
            let slot = match key.trim() {
                "peak_flops" => &mut peak,
                "mem_bandwidth" => &mut mem,
                "reg_bandwidth" => &mut reg,
                "bytes_per_scalar" => &mut bytes,
                other => return Err(Error::parse(idx + 1, format!("unknown key '{other}'"))),
            };
            *slot = Some(value);
        }
        let missing = |name: &str| Error::parse(0, format!("missing key '{name}'"));
        let m = Self {
            peak_flops: peak.ok_or_else(|| missing("peak_flops"))?,
            mem_bandwidth: mem.ok_or_else(|| missing("mem_bandwidth"))?,
            reg_bandwidth: reg.ok_or_else(|| missing("reg_bandwidth"))?,
            bytes_per_scalar: bytes.unwrap_or(8.0),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        format!(
            "peak_flops={:e}\nmem_bandwidth={:e}\nreg_bandwidth={:e}\nbytes_per_scalar={}\n",
            self.peak_flops, self.mem_bandwidth, self.reg_bandwidth, self.bytes_per_scalar
        )
    }
}

/// Per-call cost of a kernel, in flops and scalar transfers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KernelCharacteristics {
    pub omega: u64,
    pub beta: u64,
    pub tau: u64,
}

/// Exact characteristics for an n×k block, block width `p | k`, and `z`
/// stored nonzeros (needed only for [`Kernel::Bop`]).
pub fn characteristics(
    kernel: Kernel,
    n: u64,
    k: u64,
    p: u64,
    z: Option<u64>,
) -> Result<KernelCharacteristics> {
    if k == 0 || p == 0 || !k.is_multiple_of(p) {
        return Err(Error::config(format!("p = {p} does not divide k = {k}")));
    }
    characteristics_unchecked(kernel, n, k, p, z)
}

/// Same formulas with `q·p²` written as `k·p`, defined for any `p`.
fn characteristics_unchecked(
    kernel: Kernel,
    n: u64,
    k: u64,
    p: u64,
    z: Option<u64>,
) -> Result<KernelCharacteristics> {
    let qpp = k * p;
    Ok(match kernel {
        Kernel::Bdot => KernelCharacteristics {
            omega: 2 * n * qpp,
            beta: 2 * n * k,
            tau: 2 * n * qpp + 2 * n * k,
        },
        Kernel::Baxpy => KernelCharacteristics {
            omega: 2 * n * qpp,
            beta: 3 * n * k,
            tau: n * qpp + 2 * n * k,
        },
        Kernel::Bop => {
            let z = z.ok_or_else(|| Error::config("bop needs the nonzero count z"))?;
            KernelCharacteristics {
                omega: 2 * k * z,
                beta: 2 * z + 2 * k * n,
                tau: z * (2 + 2 * k),
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bound {
    Compute,
    Memory,
    Register,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bound::Compute => "compute",
            Bound::Memory => "memory",
            Bound::Register => "register",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub t_comp: f64,
    pub t_mem: f64,
    pub t_reg: f64,
    /// `max(t_comp, t_mem, t_reg)`
    pub time: f64,
    pub bound: Bound,
}

/// Runtime prediction. Ties resolve memory, then register, then compute.
pub fn predict(chars: &KernelCharacteristics, m: &MachineProfile) -> Prediction {
    let t_comp = chars.omega as f64 / m.peak_flops;
    let t_mem = chars.beta as f64 * m.bytes_per_scalar / m.mem_bandwidth;
    let t_reg = chars.tau as f64 * m.bytes_per_scalar / m.reg_bandwidth;
    let (time, bound) = if t_mem >= t_reg && t_mem >= t_comp {
        (t_mem, Bound::Memory)
    } else if t_reg >= t_comp {
        (t_reg, Bound::Register)
    } else {
        (t_comp, Bound::Compute)
    };
    Prediction {
        t_comp,
        t_mem,
        t_reg,
        time,
        bound,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub p: u64,
    pub chars: KernelCharacteristics,
    pub prediction: Prediction,
}

/// One prediction per block width in `p_list`.
pub fn sweep(
    kernel: Kernel,
    n: u64,
    k: u64,
    p_list: &[u64],
    z: Option<u64>,
    m: &MachineProfile,
) -> Result<Vec<SweepRow>> {
    p_list
        .iter()
        .map(|&p| {
            let chars = characteristics(kernel, n, k, p, z)?;
            Ok(SweepRow {
                p,
                chars,
                prediction: predict(&chars, m),
            })
        })
        .collect()
}

/// Smallest block width `p ∈ 1..=k` (not necessarily a divisor of `k`) at
/// which the kernel stops being memory-bound, if any.
pub fn memory_crossover(
    kernel: Kernel,
    n: u64,
    k: u64,
    z: Option<u64>,
    m: &MachineProfile,
) -> Option<u64> {
    (1..=k).find(|&p| {
        characteristics_unchecked(kernel, n, k, p, z)
            .map(|c| predict(&c, m).bound != Bound::Memory)
            .unwrap_or(false)
    })
}

/// Divisors of `k` in ascending order.
pub fn divisors(k: u64) -> Vec<u64> {
    (1..=k).filter(|p| k.is_multiple_of(*p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        let c = characteristics(Kernel::Bdot, 1000, 128, 16, None).unwrap();
        assert_eq!(
            c,
            KernelCharacteristics {
                omega: 4_096_000,
                beta: 256_000,
                tau: 4_352_000
            }
        );
        let unit = characteristics(Kernel::Bdot, 1, 1, 1, None).unwrap();
        assert_eq!(
            unit,
            KernelCharacteristics {
                omega: 2,
                beta: 2,
                tau: 4
            }
        );
        let bop = characteristics(Kernel::Bop, 25, 4, 1, Some(100)).unwrap();
        assert_eq!(
            bop,
            KernelCharacteristics {
                omega: 800,
                beta: 400,
                tau: 1000
            }
        );
        let ax = characteristics(Kernel::Baxpy, 10, 8, 2, None).unwrap();
        assert_eq!(
            ax,
            KernelCharacteristics {
                omega: 320,
                beta: 240,
                tau: 320
            }
        );
    }

    #[test]
    fn characteristic_errors() {
        assert!(characteristics(Kernel::Bdot, 10, 8, 3, None).is_err());
        assert!(characteristics(Kernel::Bop, 10, 8, 2, None).is_err());
        assert!(characteristics(Kernel::Bdot, 10, 8, 0, None).is_err());
    }

    #[test]
    fn reference_bdot_prediction() {
        let c = characteristics(Kernel::Bdot, 1_000_000, 128, 16, None).unwrap();
        let p = predict(&c, &MachineProfile::skylake_reference());
        assert!((p.t_comp - 0.05333).abs() < 1e-4);
        assert!((p.t_mem - 0.15347).abs() < 1e-4);
        assert!((p.t_reg - 0.12169).abs() < 1e-4);
        assert_eq!(p.time, p.t_mem);
        assert_eq!(p.bound, Bound::Memory);
    }

    #[test]
    fn zero_work_takes_zero_time() {
        let p = predict(
            &KernelCharacteristics::default(),
            &MachineProfile::skylake_reference(),
        );
        assert_eq!(p.time, 0.0);
        assert_eq!(p.bound, Bound::Memory);
    }

    #[test]
    fn huge_memory_bandwidth_is_never_memory_bound() {
        let m = MachineProfile::new(76.8e9, 1e300, 286.1e9).unwrap();
        let c = characteristics(Kernel::Bdot, 1000, 64, 64, None).unwrap();
        assert_ne!(predict(&c, &m).bound, Bound::Memory);
    }

    #[test]
    fn sweep_rows() {
        let m = MachineProfile::skylake_reference();
        let rows = sweep(Kernel::Bdot, 1_000_000, 128, &[1, 2, 4, 8, 16], None, &m).unwrap();
        assert!(rows.iter().all(|r| r.prediction.bound == Bound::Memory));
        let rows = sweep(Kernel::Bdot, 1_000_000, 128, &[32, 64, 128], None, &m).unwrap();
        assert!(rows.iter().all(|r| r.prediction.bound == Bound::Register));
        assert!(sweep(Kernel::Bdot, 10, 128, &[], None, &m)
            .unwrap()
            .is_empty());
        assert!(sweep(Kernel::Bdot, 10, 128, &[3], None, &m).is_err());
    }

    #[test]
    fn profile_parsing() {
        let m = MachineProfile::parse(
            "# skylake\npeak_flops=7.68e10\nmem_bandwidth=1.3345e10\n\nreg_bandwidth = 2.861e11\n",
        )
        .unwrap();
        assert_eq!(m, MachineProfile::skylake_reference());
        assert_eq!(MachineProfile::parse(&m.to_text()).unwrap(), m);
        assert!(MachineProfile::parse("peak_flops=1\nmem_bandwidth=1\n").is_err());
        assert!(MachineProfile::parse("peak_flops=1\nmem_bandwidth=1\nreg_bandwidth=-1").is_err());
        assert!(MachineProfile::parse("peak_flops:1").is_err());
        assert!(MachineProfile::parse("speed=1").is_err());
    }

    #[test]
    fn divisors_of_128() {
        assert_eq!(divisors(128), vec![1, 2, 4, 8, 16, 32, 64, 128]);
    }
}
