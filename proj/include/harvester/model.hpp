#pragma once

#include <iosfwd>
#include <string>

#include "harvester/types.hpp"

namespace harvester {

// Physical, control, and circuit parameters of the coupled bending-torsion
// harvester beam. Nondimensional by convention; no unit handling here.
struct BeamParameters {
  double m;   // mass per unit length, > 0
  double J;   // polar mass moment, > 0
  double S;   // bending-torsion coupling, 0 <= S < min(m, J)
  double E;   // bending rigidity, > 0
  double G;   // torsion rigidity, > 0
  double L;   // beam length, > 0
  double k1;  // bending control gain, > 0 (divides several constants)
  double k2;  // torsion control gain, > 0
  double Cp;  // piezo capacitance, > 0
  double R;   // load resistance, > 0
  double CD;  // direct piezo coefficient, < 0
  double CI;  // inverse piezo coefficient, > 0
};

// Reference set used by tests and as the CLI default. Satisfies every standing
// assumption, is balanced (CI = -CD), and has k2 > sqrt(G*J).
BeamParameters default_parameters();

struct Strictness {
  bool require_balanced = false;  // CI == -CD exactly
  bool require_branch1 = false;   // k2 > sqrt(G*J)
};

// Parameters that passed validate_parameters. D = m*J - S^2 > 0 is cached.
struct ValidatedParameters {
  BeamParameters p;
  double D = 0.0;
};

ValidatedParameters validate_parameters(const BeamParameters& raw, Strictness strict = {});

// Constants of the characteristic cubic and the root expansions.
//   alpha = J/G, beta = m/E, gamma = D/(EG)
//   a1 = sqrt(J/G)                   a2 = G^{3/2} S^2 / (2 E J^{5/2})
//   a3 = (D/(EJ))^{1/4}              a4 = G S^2 / (4 E^{3/4} J^{7/4} D^{1/4})
//   cj = aj * L
struct DerivedConstants {
  double D;
  double alpha, beta, gamma;
  double a1, a2, a3, a4;
  double c1, c2, c3, c4;
};

DerivedConstants derive_constants(const ValidatedParameters& v);

// Constants of the right-reflection expansion. Only dhat2 and d2 respond to
// changes in the piezo parameters Cp, R, CD, CI. rtilde11's defining formula
// carries the circuit term i*CI*CD/(k1*Cp), but the same term is subtracted
// back inside d2 = d1^2 - dhat2, so its assembled value is circuit-free; the
// remaining constants never touch the piezo parameters at all. Both facts are
// load-bearing for the perturbation results and are asserted by tests.
struct BoundaryConstants {
  Cx d1, dhat2, d2;
  Cx r11, rhat11, rtilde11;
  Cx r12, rhat12, rhat13;
  Cx r21, r22, rhat22, r23;
};

BoundaryConstants boundary_constants(const ValidatedParameters& v, const DerivedConstants& d);

// Flat key=value parameter file; '#' starts a comment; keys exactly
// m,J,S,E,G,L,k1,k2,Cp,R,CD,CI each required once.
BeamParameters parse_parameter_file(std::istream& in);
BeamParameters load_parameter_file(const std::string& path);

}  // namespace harvester
