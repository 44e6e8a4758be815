//! Resolved sign, normalization and grouping conventions.
//!
//! Every numerical output of the crate depends on a handful of choices
//! (orientation of the speed slot, moment scaling, Bloch frequency frame and
//! so on). They are collected here as a table so that reports can carry a
//! fingerprint of the exact conventions they were produced under.

/// One resolved convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Convention {
    pub key: &'static str,
    pub value: &'static str,
}

/// Version tag of the table; bump whenever an entry changes meaning.
pub const CONVENTIONS_VERSION: u32 = 1;

/// All conventions that affect reported numbers.
pub const CONVENTIONS: &[Convention] = &[
    Convention { key: "potential", value: "V = F(u) + (c/2)u^2 - a u; P = E - V" },
    Convention { key: "profile_ode", value: "u_z^2/2 = E - V(u)" },
    Convention { key: "moments", value: "zeta_k = 2 int_{u-}^{u+} u^k sqrt(2P) du_x-scaled; T,M,P = loop integrals of (1,u,u^2)/sqrt(2P)" },
    Convention { key: "hamiltonian", value: "H = int (u_z^2/2 - F(u)) dz" },
    Convention { key: "jacobian_orientation", value: "jac rows (T,M,P), columns (a,E,c)" },
    Convention { key: "speed_slot", value: "{T,M,P}_{a,E,c} and {T,P}_{E,c} reported with respect to c~ = -c" },
    Convention { key: "delta_mi", value: "X = {T,P}_{E,c~} + 2{M,P}_{a,E}; Delta = X^3/2 - 6.75 {T,M,P}^2" },
    Convention { key: "dispersion_cubic", value: "-w^3 + (X/2) w - {T,M,P}/2; slopes = -T/w" },
    Convention { key: "hypothesis_tolerance", value: "relative to max |jac entry| powers 1,2,3" },
    Convention { key: "root_separation", value: "1e-7 relative to 1 + max|root|" },
    Convention { key: "bloch_frame", value: "q_n = 2 pi n / T + xi (local, BO); q_n = n + xi in the 2 pi frame (nonlocal)" },
    Convention { key: "bo_profile", value: "Lambda u - c u - u^2 = a; P = (1/2) int u^2" },
    Convention { key: "stokes_w0", value: "w0 = b(1-m) - 3 b^2 (1-m)" },
];

/// Canonical text of the table, suitable for hashing.
pub fn fingerprint_source() -> String {
    let mut s = format!("modwave-conventions-v{CONVENTIONS_VERSION}\n");
    for c in CONVENTIONS {
        s.push_str(c.key);
        s.push('=');
        s.push_str(c.value);
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_unique_and_source_is_stable() {
        let mut keys: Vec<_> = CONVENTIONS.iter().map(|c| c.key).collect();
        keys.sort_unstable();
        keys.dedup();
        assert_eq!(keys.len(), CONVENTIONS.len());
        assert_eq!(fingerprint_source(), fingerprint_source());
        assert!(fingerprint_source().lines().count() == CONVENTIONS.len() + 1);
    }
}
