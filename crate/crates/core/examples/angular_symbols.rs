//! Wigner symbols, including half-integer arguments.

use dipolar_shield::angular::{
    c_tensor_element, clebsch_gordan, wigner_3j_int, wigner_6j, HalfIntegerAM,
};

fn main() {
    let h = HalfIntegerAM::from_twice;
    println!(
        "(1 1 2; 0 0 0)          = {:+.15}",
        wigner_3j_int(1, 1, 2, 0, 0, 0)
    );
    println!(
        "<1 1; 1 1 | 2 2>         = {:+.15}",
        clebsch_gordan(1.into(), 1.into(), 1.into(), 1.into(), 2.into(), 2.into())
    );
    println!(
        "<1/2 1/2; 1/2 -1/2 | 1 0> = {:+.15}",
        clebsch_gordan(h(1), h(1), h(1), h(-1), 1.into(), 0.into())
    );
    println!(
        "{{1/2 1/2 1; 1/2 1/2 0}}    = {:+.15}",
        wigner_6j(h(1), h(1), 1.into(), h(1), h(1), 0.into())
    );
    println!(
        "<1 0|C^1_0|0 0>          = {:+.15}",
        c_tensor_element(1, 0, 1, 0, 0, 0)
    );
    println!(
        "<2 0|C^2_0|2 0>          = {:+.15}",
        c_tensor_element(2, 0, 2, 0, 2, 0)
    );
}
