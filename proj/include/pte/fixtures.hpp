#ifndef PTE_FIXTURES_HPP
#define PTE_FIXTURES_HPP

#include "pte/core.hpp"
#include "pte/quadring.hpp"

// Published ideal symmetric solutions used as regression fixtures.
namespace pte::fixtures {

// size 9, B = -A (Letac)
PtePair letac9a();   // height 99
PtePair letac9b();   // height 174
// size 10, A = -A, B = -B
PtePair z10a();      // height 313
PtePair z10b();      // height 515
// size 12
PtePair z12a();      // height 151
PtePair z12b();      // height 2058 (Broadhurst)
PtePair z12c();      // height 1511 (Choudhry-Wroblewski)

std::vector<PtePair> all_z();

// Gaussian integers (d=1), size 10: five known solutions
quad::QuadPair gi10(int which);  // 0..4
quad::QuadPair gi12();           // size 12, fourfold i-orbit
quad::QuadPair q2_9();           // d=2, size 9
quad::QuadPair ei9();            // d=3, size 9
quad::QuadPair ei12a();          // d=3, size 12, sixfold
quad::QuadPair ei12b();          // d=3, size 12, sixfold

std::vector<quad::QuadPair> all_quad();

}  // namespace pte::fixtures

#endif
