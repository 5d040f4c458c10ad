#include "optionhost/fixture_specs.hpp"

namespace optionhost::fixtures {

namespace {

OptionDef option(std::string id, std::string flag, OptionKind kind,
                 RenderStyle style, std::string label, std::string doc) {
  OptionDef def;
  def.id = std::move(id);
  def.flag = std::move(flag);
  def.kind = kind;
  def.style = style;
  def.label = std::move(label);
  def.doc = std::move(doc);
  return def;
}

}  // namespace

argdoc::ArgSpec argv_echo() {
  argdoc::ArgSpec spec;
  spec.name = "argv-echo";
  spec.version = "1.0";
  spec.summary = "Print every argument on its own line";
  spec.description =
      "argv-echo writes each command-line argument it receives to standard "
      "output, one per line, exactly as the operating system delivered it. It "
      "exists to check what a host actually passes to a program.";
  spec.man_section = 1;
  spec.date = "2026-01-15";
  spec.author = "optionhost developers";

  auto theta = option("t", "-t", OptionKind::Float, RenderStyle::SeparateToken,
                      "Theta",
                      "Population mutation rate. Must lie between 0 and 10.");
  theta.required = true;
  theta.range = NumericRange{0.0, 10.0};
  theta.default_value = 1.0;
  spec.add("Model", std::move(theta));

  auto model = option("model", "--model", OptionKind::Choice,
                      RenderStyle::EqualsJoined, "Substitution model",
                      "Nucleotide substitution model used for the likelihood.");
  model.choices = {{"hky", "Hasegawa-Kishino-Yano"},
                   {"jc", "Jukes-Cantor"},
                   {"gtr", "General time reversible"}};
  model.default_value = ChoiceKey{"hky"};
  spec.add("Model", std::move(model));

  auto seed = option("seed", "--seed", OptionKind::Int,
                     RenderStyle::SeparateToken, "Random seed",
                     "Seed for the pseudo-random number generator.");
  seed.range = NumericRange{0.0, 4294967295.0};
  spec.add("Model", std::move(seed));

  spec.add("Model", option("verbose", "-v", OptionKind::Flag,
                           RenderStyle::FlagOnly, "Verbose output",
                           "Print progress information while running."));

  spec.add("Model", option("name", "--name", OptionKind::String,
                           RenderStyle::SeparateToken, "Run name",
                           "Free-form label copied into the output header."));

  spec.groups.back().doc = "Parameters of the simulated model.";

  spec.add("Files", option("output", "-o", OptionKind::OutFile,
                           RenderStyle::SeparateToken, "Output file",
                           "Where results are written. Relative paths are "
                           "resolved against the working directory."));

  auto include = option("include", "-I", OptionKind::Dir,
                        RenderStyle::SeparateToken, "Include directory",
                        "Directory searched for auxiliary files. May be "
                        "given several times; searched in order.");
  include.repeatable = true;
  spec.add("Files", std::move(include));

  spec.add("Files", option("input", "", OptionKind::InFile,
                           RenderStyle::Positional, "Input file",
                           "Data file to analyse."));
  spec.groups.back().doc = "Input and output locations.";
  return spec;
}

argdoc::ArgSpec seeded_output() {
  argdoc::ArgSpec spec;
  spec.name = "seeded-output";
  spec.version = "1.0";
  spec.summary = "Write a deterministic pseudo-random byte stream";
  spec.description =
      "Writes the requested number of bytes from a seeded mt19937_64 stream "
      "to standard output, then the SHA-256 digest of those bytes to "
      "standard error.";
  spec.date = "2026-01-15";

  auto seed = option("seed", "--seed", OptionKind::Int,
                     RenderStyle::SeparateToken, "Seed", "Generator seed.");
  seed.required = true;
  spec.add("Stream", std::move(seed));
  auto bytes = option("bytes", "--bytes", OptionKind::Int,
                      RenderStyle::SeparateToken, "Byte count",
                      "Number of bytes to write.");
  bytes.required = true;
  bytes.range = NumericRange{0.0, 1e12};
  spec.add("Stream", std::move(bytes));
  return spec;
}

argdoc::ArgSpec write_file() {
  argdoc::ArgSpec spec;
  spec.name = "write-file";
  spec.version = "1.0";
  spec.summary = "Write a line of text to a file";
  spec.description =
      "Creates or truncates the output file and writes the text followed by "
      "a newline. Relative paths resolve against the working directory.";
  spec.date = "2026-01-15";

  auto out = option("out", "--out", OptionKind::OutFile,
                    RenderStyle::SeparateToken, "Output file",
                    "File to create.");
  out.required = true;
  spec.add("Output", std::move(out));
  auto text = option("text", "--text", OptionKind::String,
                     RenderStyle::EqualsJoined, "Text", "Line to write.");
  text.default_value = Text{"hello"};
  spec.add("Output", std::move(text));
  return spec;
}

std::vector<std::string> names() {
  return {"argv-echo", "seeded-output", "write-file"};
}

argdoc::ArgSpec by_name(std::string_view name) {
  if (name == "argv-echo") return argv_echo();
  if (name == "seeded-output") return seeded_output();
  if (name == "write-file") return write_file();
  throw Error(ErrorCode::UnknownOption,
              "no fixture spec named '" + std::string(name) + "'",
              {std::string(name)});
}

}  // namespace optionhost::fixtures
