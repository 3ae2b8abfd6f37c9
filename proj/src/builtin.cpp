#include <algorithm>
#include <string>

#include "volterra/error.hpp"
#include "volterra/problem.hpp"

namespace volterra {

namespace {

SystemSpec model01() {
  SystemSpec s;
  s.name = "model01";
  s.description = "linear 2x2 system on [0,2], one curve t/2; exact solution (cos t, sin t)";
  s.horizon = 2.0;
  s.equations = 2;
  s.curves = {"t/2"};
  s.kernels = {{"1+t+s", "1"}, {"1+t-s", "-1"}};
  s.rhs = {"3*t*sin(t/2)/2 + sin(t/2) + 2*cos(t/2) - cos(t) - 1",
           "t*sin(t/2)/2 + sin(t/2) - 2*cos(t/2) + cos(t) + 1"};
  s.exact = {"cos(t)", "sin(t)"};
  return s;
}

SystemSpec model02() {
  SystemSpec s;
  s.name = "model02";
  s.description = "linear 3x3 system on [0,2], curves t/3 and 2t/3; exact solution (cos t, sin t, sin(t)/4)";
  s.horizon = 2.0;
  s.equations = 3;
  s.curves = {"t/3", "2*t/3"};
  s.kernels = {{"1+t+s", "1", "1+s"}, {"1+t-s", "-1", "1-t"}, {"1+t/5+s", "1+t-s", "-(1+s)"}};
  s.rhs = {
      "4*t*sin(t/3)/3 + t*cos(2*t/3)/6 - t*cos(t)/4 + sin(t/3) - sin(2*t/3)/4 + sin(t)/4"
      " + 2*cos(t/3) - 3*cos(2*t/3)/4 - cos(t)/4 - 1",
      "2*t*sin(t/3)/3 - t*cos(2*t/3)/4 + t*cos(t)/4 + sin(t/3) - 2*cos(t/3)"
      " + 5*cos(2*t/3)/4 - cos(t)/4 + 1",
      "8*t*sin(t/3)/15 + 2*t*cos(t/3)/3 - t*cos(2*t/3)/2 + t*cos(t)/4 + 2*sin(t/3)"
      " - 3*sin(2*t/3)/4 - sin(t)/4 + 2*cos(t/3) - 5*cos(2*t/3)/4 + cos(t)/4 - 1"};
  s.exact = {"cos(t)", "sin(t)", "sin(t)/4"};
  return s;
}

SystemSpec nonlinear_scalar() {
  SystemSpec s;
  s.name = "nonlinear-scalar";
  s.description = "one nonlinear equation on [0,1], two bands split at t/2 sharing one unknown; exact solution t^2";
  s.horizon = 1.0;
  s.equations = 1;
  s.curves = {"t/2"};
  s.kernels = {{"1+t+s", "1+2*t"}};
  s.nonlinearities = {{"x+x^2", "x"}};
  s.rhs = {"t^3/3 + 41*t^4/64 + t^5/160 + 17*t^6/1920"};
  s.unknown_of_band = {0, 0};
  s.exact = {"t^2"};
  s.guess = {"0"};
  return s;
}

SystemSpec nonlinear_system(int which) {
  SystemSpec s;
  s.horizon = 1.0;
  s.equations = 2;
  s.curves = {"t/2"};
  s.kernels = {{"s*(t+s)", "1"}, {"1+t-s", "-1"}};
  s.nonlinearities = {{"x^2", "3*x+x^3"}, {"x-x^2", "x+x^4"}};
  if (which == 1) {
    s.name = "nonlinear-sys1";
    s.description = "nonlinear 2x2 system on [0,1], curve t/2; exact (t^2, t^3), far guess (0.4t^2, 0.5t^3)";
    s.rhs = {"1023*t^10/10240 + 5*t^7/1344 + 45*t^4/64",
             "-8191*t^13/106496 - 7*t^6/1920 - t^5/160 - 5*t^4/24 + t^3/24"};
    s.exact = {"t^2", "t^3"};
    s.guess = {"0.4*t^2", "0.5*t^3"};
  } else {
    s.name = "nonlinear-sys2";
    s.description = "nonlinear 2x2 system on [0,1], curve t/2; exact (cos t, sin t), near guess (0.9cos t, 0.9sin t)";
    s.rhs = {
        "t^3/12 + 3*t^2*sin(t)/16 + t*cos(t)/4 - t/8 - sin(t)/8 + 15*cos(t/2)/4 - 15*cos(t)/4"
        " - cos(3*t/2)/12 + cos(3*t)/12",
        "-3*t^2/16 + t*sin(t/2)/2 - t*sin(t)/8 - 7*t/16 + sin(t/2) - sin(t)/2 + 9*sin(2*t)/32"
        " - sin(4*t)/32 - 2*cos(t/2) + 9*cos(t)/8 + 7/8"};
    s.exact = {"cos(t)", "sin(t)"};
    s.guess = {"0.9*cos(t)", "0.9*sin(t)"};
  }
  return s;
}

std::vector<SystemSpec> registry() {
  return {model01(), model02(), nonlinear_scalar(), nonlinear_system(1), nonlinear_system(2)};
}

}  // namespace

std::vector<BuiltinInfo> builtin_catalog() {
  std::vector<BuiltinInfo> out;
  for (const SystemSpec& s : registry()) out.push_back({s.name, s.description});
  return out;
}

SystemSpec builtin_spec(std::string_view name) {
  for (SystemSpec& s : registry()) {
    if (s.name == name) return std::move(s);
  }
  std::string known;
  for (const BuiltinInfo& b : builtin_catalog()) known += (known.empty() ? "" : ", ") + b.name;
  throw ConfigError("unknown builtin '" + std::string(name) + "' (known: " + known + ")");
}

VolterraSystem builtin(std::string_view name) { return VolterraSystem::from_spec(builtin_spec(name)); }

}  // namespace volterra
