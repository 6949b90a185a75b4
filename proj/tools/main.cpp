#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gmdiag/network.hpp"
#include "gmdiag/transform.hpp"
#include "network_file.hpp"

namespace {

using gmdiag::DegenerateError;
using gmdiag_tools::format_double;
using gmdiag_tools::NetworkFile;
using gmdiag_tools::ParseError;

std::size_t state_count(const std::vector<gmdiag::FiniteSet>& sets,
                        std::size_t cap) {
  std::size_t n = 1;
  for (const gmdiag::FiniteSet& fs : sets) {
    if (n > cap) return n;
    n *= fs.size();
  }
  return n;
}

void guard_states(const std::vector<gmdiag::FiniteSet>& sets,
                  std::size_t max_states) {
  if (state_count(sets, max_states) > max_states)
    throw ParseError("state space exceeds --max-states");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write file: " + path);
  out << text;
}

std::vector<std::string> joint_lines(const gmdiag::Distribution& dist) {
  const std::vector<gmdiag::FiniteSet>& sets = dist.codomain();
  std::vector<std::string> lines;
  for (std::size_t lin = 0; lin < dist.codomain_size(); ++lin) {
    const std::vector<std::size_t> tup = gmdiag::unravel_index(sets, lin);
    std::string line;
    for (std::size_t k = 0; k < sets.size(); ++k) {
      if (k > 0) line += ' ';
      line += sets[k].var_name + "=" + sets[k].elements[tup[k]];
    }
    line += ": " + format_double(dist(lin, 0));
    lines.push_back(std::move(line));
  }
  std::sort(lines.begin(), lines.end());
  return lines;
}

const gmdiag::BayesianNetwork& expect_bayesian(const NetworkFile& nf,
                                               const std::string& what) {
  if (!nf.is_bayesian())
    throw ParseError(what + " expects a bayesian network file");
  return *nf.bayesian;
}

const gmdiag::MarkovNetwork& expect_markov(const NetworkFile& nf,
                                           const std::string& what) {
  if (nf.is_bayesian())
    throw ParseError(what + " expects a markov network file");
  return *nf.markov;
}

int run_moralise(const std::string& input, const std::string& output,
                 double tolerance, std::size_t max_states) {
  const NetworkFile nf = gmdiag_tools::load_network(input);
  const gmdiag::BayesianNetwork& bn = expect_bayesian(nf, "moralise");
  const gmdiag::MarkovNetwork mn = gmdiag::moralise_bn(bn);
  write_file(output, gmdiag_tools::write_markov(mn));

  if (state_count(bn.sets(), max_states) > max_states) {
    std::cout << "joint check skipped: state space exceeds --max-states\n";
    return 0;
  }
  const gmdiag::NormalizeResult joint = gmdiag::mn_joint(mn);
  if (joint.degenerate()) throw DegenerateError("degenerate network joint");
  const double deviation =
      gmdiag::max_abs_diff(*joint.dist, gmdiag::bn_joint(bn));
  std::cout << "Z: " << format_double(joint.Z) << '\n';
  std::cout << "max deviation: " << format_double(deviation) << '\n';
  if (deviation > tolerance) {
    std::cout << "FAIL\n";
    return 2;
  }
  std::cout << "PASS\n";
  return 0;
}

int run_triangulate(const std::string& input, const std::string& output,
                    bool dump_unnormalized) {
  const NetworkFile nf = gmdiag_tools::load_network(input);
  const gmdiag::MarkovNetwork& mn = expect_markov(nf, "triangulate");
  const gmdiag::TriangulateResult result = gmdiag::triangulate_mn(mn);
  write_file(output, gmdiag_tools::write_bayesian(result.bn));
  if (dump_unnormalized)
    std::cout << gmdiag_tools::write_unnormalized(result);
  return 0;
}

int run_joint(const std::string& input, std::size_t max_states) {
  const NetworkFile nf = gmdiag_tools::load_network(input);
  if (nf.is_bayesian()) {
    guard_states(nf.bayesian->sets(), max_states);
    for (const std::string& line : joint_lines(gmdiag::bn_joint(*nf.bayesian)))
      std::cout << line << '\n';
    return 0;
  }
  guard_states(nf.markov->sets(), max_states);
  const gmdiag::NormalizeResult joint = gmdiag::mn_joint(*nf.markov);
  if (joint.degenerate())
    throw DegenerateError("degenerate network: normalizing constant is zero");
  std::cout << "Z: " << format_double(joint.Z) << '\n';
  for (const std::string& line : joint_lines(*joint.dist))
    std::cout << line << '\n';
  return 0;
}

int run_verify(const std::string& direction, const std::string& src_path,
               const std::string& dst_path, double tolerance,
               std::size_t max_states) {
  const NetworkFile src = gmdiag_tools::load_network(src_path);
  gmdiag::Distribution transformed, reference;
  if (direction == "moralise") {
    const gmdiag::BayesianNetwork& bn = expect_bayesian(src, "verify moralise");
    guard_states(bn.sets(), max_states);
    const gmdiag::NormalizeResult joint =
        gmdiag::mn_joint(gmdiag::moralise_bn(bn));
    if (joint.degenerate()) throw DegenerateError("degenerate network joint");
    transformed = *joint.dist;
    if (dst_path.empty()) {
      reference = gmdiag::bn_joint(bn);
    } else {
      const NetworkFile dst = gmdiag_tools::load_network(dst_path);
      const gmdiag::NormalizeResult dst_joint =
          gmdiag::mn_joint(expect_markov(dst, "verify moralise destination"));
      if (dst_joint.degenerate())
        throw DegenerateError("degenerate network joint");
      reference = *dst_joint.dist;
    }
  } else {
    const gmdiag::MarkovNetwork& mn = expect_markov(src, "verify triangulate");
    guard_states(mn.sets(), max_states);
    const gmdiag::NormalizeResult src_joint = gmdiag::mn_joint(mn);
    if (src_joint.degenerate())
      throw DegenerateError("degenerate network: normalizing constant is zero");
    transformed = gmdiag::bn_joint(gmdiag::triangulate_mn(mn).bn);
    reference = dst_path.empty()
                    ? *src_joint.dist
                    : gmdiag::bn_joint(expect_bayesian(
                          gmdiag_tools::load_network(dst_path),
                          "verify triangulate destination"));
  }
  double deviation;
  try {
    deviation = gmdiag::max_abs_diff(transformed, reference);
  } catch (const std::invalid_argument&) {
    throw ParseError("joints have different shapes");
  }
  std::cout << "max deviation: " << format_double(deviation) << '\n';
  if (deviation > tolerance) {
    std::cout << "FAIL\n";
    return 2;
  }
  std::cout << "PASS\n";
  return 0;
}

int run_dot(const std::string& input) {
  const NetworkFile nf = gmdiag_tools::load_network(input);
  if (nf.is_bayesian())
    std::cout << gmdiag::to_dot(nf.bayesian->dag());
  else
    std::cout << gmdiag::to_dot(nf.markov->graph());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian and Markov network transforms with verified joints"};
  app.require_subcommand(1);
  double tolerance = 1e-9;
  std::size_t max_states = std::size_t{1} << 20;
  app.add_option("--tolerance", tolerance,
                 "maximum allowed joint deviation for checks")
      ->capture_default_str();
  app.add_option("--max-states", max_states,
                 "largest joint state space that will be materialized")
      ->capture_default_str();

  std::string input, output, direction, dst_path;
  bool dump_unnormalized = false;

  CLI::App* mor = app.add_subcommand(
      "moralise", "convert a bayesian network file to a markov network file");
  mor->fallthrough();
  mor->add_option("input", input, "bayesian network file")->required();
  mor->add_option("output", output, "markov network file to write")->required();

  CLI::App* tri = app.add_subcommand(
      "triangulate",
      "convert a markov network file to a bayesian network file");
  tri->fallthrough();
  tri->add_option("input", input, "markov network file")->required();
  tri->add_option("output", output, "bayesian network file to write")
      ->required();
  tri->add_flag("--dump-unnormalized", dump_unnormalized,
                "also print the unnormalized tables, column sums, and Z");

  CLI::App* joint = app.add_subcommand(
      "joint", "print the joint distribution of a network file");
  joint->fallthrough();
  joint->add_option("input", input, "network file")->required();

  CLI::App* verify = app.add_subcommand(
      "verify", "transform and check that the joint is preserved");
  verify->fallthrough();
  verify->add_option("direction", direction, "moralise or triangulate")
      ->required()
      ->check(CLI::IsMember({"moralise", "triangulate"}));
  verify->add_option("src", input, "source network file")->required();
  verify->add_option("dst", dst_path,
                     "transformed network file to compare against");

  CLI::App* dot =
      app.add_subcommand("dot", "print the network's graph in DOT format");
  dot->fallthrough();
  dot->add_option("input", input, "network file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }

  try {
    if (mor->parsed()) return run_moralise(input, output, tolerance, max_states);
    if (tri->parsed()) return run_triangulate(input, output, dump_unnormalized);
    if (joint->parsed()) return run_joint(input, max_states);
    if (verify->parsed())
      return run_verify(direction, input, dst_path, tolerance, max_states);
    if (dot->parsed()) return run_dot(input);
  } catch (const DegenerateError& e) {
    std::cerr << e.what() << '\n';
    return 3;
  } catch (const ParseError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  return 1;
}
