#include "bnnv/model.hpp"

#include "bnnv/error.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <sstream>

namespace bnnv {

namespace {

void check_bipolar(int v) {
  if (v != -1 && v != 1)
    throw ShapeError(fmt::format("weight {} is not bipolar (expected -1 or 1)", v));
}

} // namespace

Layer::Layer(int inputs, int neurons) : Layer(inputs, neurons, {}) {}

Layer::Layer(int inputs, int neurons, std::vector<Bipolar> row_major)
    : inputs_(inputs), neurons_(neurons), weights_(std::move(row_major)) {
  if (inputs < 1 || neurons < 1)
    throw ShapeError(fmt::format("layer dimensions must be positive, got {} inputs and {} neurons",
                                 inputs, neurons));
  const auto expected = static_cast<std::size_t>(neurons) * static_cast<std::size_t>(fan_in());
  if (weights_.empty())
    weights_.assign(expected, 1);
  if (weights_.size() != expected)
    throw ShapeError(fmt::format("layer expects {} weights, got {}", expected, weights_.size()));
  for (Bipolar w : weights_)
    check_bipolar(w);
}

void Layer::set_weight(int neuron, int column, Bipolar w) {
  check_bipolar(w);
  weights_.at(static_cast<std::size_t>(neuron) * fan_in() + column) = w;
}

BnnModel::BnnModel(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty())
    throw ShapeError("a model needs at least one layer");
  for (std::size_t l = 1; l < layers_.size(); ++l)
    if (layers_[l].inputs() != layers_[l - 1].neurons())
      throw ShapeError(fmt::format("layer {} expects {} inputs but layer {} has {} neurons", l + 1,
                                   layers_[l].inputs(), l, layers_[l - 1].neurons()));
}

std::vector<int> BnnModel::dims() const {
  std::vector<int> d{layers_.front().inputs()};
  for (const auto &layer : layers_)
    d.push_back(layer.neurons());
  return d;
}

BipolarEvaluation eval_bipolar(const BnnModel &model, std::span<const Bipolar> input) {
  if (static_cast<int>(input.size()) != model.input_width())
    throw ShapeError(fmt::format("input has {} entries, model expects {}", input.size(),
                                 model.input_width()));
  std::vector<Bipolar> x(input.begin(), input.end());
  for (Bipolar v : x)
    if (v != -1 && v != 1)
      throw ShapeError(fmt::format("input value {} is not bipolar", static_cast<int>(v)));

  BipolarEvaluation result;
  for (int l = 1; l <= model.layer_count(); ++l) {
    const Layer &layer = model.layer(l);
    std::vector<int> sums(static_cast<std::size_t>(layer.neurons()));
    for (int i = 0; i < layer.neurons(); ++i) {
      auto w = layer.row(i);
      int im = w[0];
      for (int j = 1; j < layer.fan_in(); ++j)
        im += w[j] * x[j - 1];
      sums[i] = im;
    }
    result.sums.push_back(sums);
    if (l == model.layer_count()) {
      result.outputs = std::move(sums);
    } else {
      x.assign(sums.size(), 1);
      for (std::size_t i = 0; i < sums.size(); ++i)
        x[i] = sums[i] >= 0 ? 1 : -1;
      result.hidden.push_back(x);
    }
  }
  return result;
}

BooleanEvaluation eval_boolean(const BnnModel &model, std::span<const Bit> input) {
  if (static_cast<int>(input.size()) != model.input_width())
    throw ShapeError(fmt::format("input has {} entries, model expects {}", input.size(),
                                 model.input_width()));
  std::vector<Bit> x(input.begin(), input.end());
  for (Bit b : x)
    if (b > 1)
      throw ShapeError(fmt::format("input value {} is not a bit", static_cast<int>(b)));

  BooleanEvaluation result;
  for (int l = 1; l <= model.layer_count(); ++l) {
    const Layer &layer = model.layer(l);
    std::vector<int> counts(static_cast<std::size_t>(layer.neurons()));
    for (int i = 0; i < layer.neurons(); ++i) {
      auto w = layer.row(i);
      int count = to_bit(w[0]) == 1 ? 1 : 0; // bias input bit is 1
      for (int j = 1; j < layer.fan_in(); ++j)
        count += to_bit(w[j]) == x[j - 1] ? 1 : 0;
      counts[i] = count;
    }
    if (l == model.layer_count()) {
      result.output_counts = std::move(counts);
    } else {
      const int threshold = activation_threshold(layer.fan_in());
      x.assign(counts.size(), 0);
      for (std::size_t i = 0; i < counts.size(); ++i)
        x[i] = counts[i] >= threshold ? 1 : 0;
      result.hidden.push_back(x);
    }
  }
  return result;
}

int convert_domain(int count, int fan_in) {
  if (fan_in < 0 || count < 0 || count > fan_in)
    throw ShapeError(fmt::format("count {} outside 0..{}", count, fan_in));
  return 2 * count - fan_in;
}

// Model text format:
//
//   # comment
//   layers 2
//   dims 4 3 2
//   weights 1
//   -1 1 1 -1 1        (one row per neuron, bias weight first)
//   ...
//   weights 2
//   ...
//
// Blank lines and '#' comments are ignored.
namespace {

class LineReader {
public:
  explicit LineReader(std::string_view text) : text_(text) {}

  /// Next non-blank, non-comment line split into tokens; empty at EOF.
  std::vector<std::string_view> next() {
    while (pos_ < text_.size()) {
      auto end = text_.find('\n', pos_);
      if (end == std::string_view::npos)
        end = text_.size();
      std::string_view line = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
      ++line_no_;
      if (auto hash = line.find('#'); hash != std::string_view::npos)
        line = line.substr(0, hash);
      std::vector<std::string_view> tokens;
      std::size_t i = 0;
      while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
          ++i;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
          ++i;
        if (i > start)
          tokens.push_back(line.substr(start, i - start));
      }
      if (!tokens.empty())
        return tokens;
    }
    return {};
  }

  int line_no() const noexcept { return line_no_; }

  [[noreturn]] void fail(const std::string &msg) const {
    throw ParseError(fmt::format("model line {}: {}", line_no_, msg));
  }

  int to_int(std::string_view tok) const {
    if (!tok.empty() && tok.front() == '+')
      tok.remove_prefix(1);
    int value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
      fail(fmt::format("expected an integer, got '{}'", tok));
    return value;
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_no_ = 0;
};

} // namespace

BnnModel parse_model(std::string_view text) {
  LineReader reader(text);

  auto tokens = reader.next();
  if (tokens.size() != 2 || tokens[0] != "layers")
    reader.fail("expected 'layers <L>'");
  const int layer_count = reader.to_int(tokens[1]);
  if (layer_count < 1)
    throw ShapeError("layer count must be at least 1");

  tokens = reader.next();
  if (tokens.empty() || tokens[0] != "dims")
    reader.fail("expected 'dims d0 ... dL'");
  if (static_cast<int>(tokens.size()) != layer_count + 2)
    throw ShapeError(fmt::format("model line {}: expected {} dims, got {}", reader.line_no(),
                                 layer_count + 1, tokens.size() - 1));
  std::vector<int> dims;
  for (std::size_t k = 1; k < tokens.size(); ++k) {
    dims.push_back(reader.to_int(tokens[k]));
    if (dims.back() < 1)
      throw ShapeError(fmt::format("model line {}: dimensions must be positive", reader.line_no()));
  }

  std::vector<Layer> layers;
  for (int l = 1; l <= layer_count; ++l) {
    tokens = reader.next();
    if (tokens.size() != 2 || tokens[0] != "weights" || reader.to_int(tokens[1]) != l)
      reader.fail(fmt::format("expected 'weights {}'", l));
    const int inputs = dims[l - 1];
    const int neurons = dims[l];
    std::vector<Bipolar> weights;
    weights.reserve(static_cast<std::size_t>(neurons) * (inputs + 1));
    for (int i = 0; i < neurons; ++i) {
      tokens = reader.next();
      if (tokens.empty())
        reader.fail(fmt::format("layer {} ends after {} of {} rows", l, i, neurons));
      if (static_cast<int>(tokens.size()) != inputs + 1)
        throw ShapeError(fmt::format("model line {}: row has {} weights, expected {}",
                                     reader.line_no(), tokens.size(), inputs + 1));
      for (auto tok : tokens) {
        const int w = reader.to_int(tok);
        if (w != -1 && w != 1)
          throw ShapeError(fmt::format("model line {}: weight {} is not -1 or 1", reader.line_no(), w));
        weights.push_back(static_cast<Bipolar>(w));
      }
    }
    layers.emplace_back(inputs, neurons, std::move(weights));
  }
  if (!reader.next().empty())
    reader.fail("trailing content after last layer");
  return BnnModel(std::move(layers));
}

std::string serialize_model(const BnnModel &model) {
  std::string out = fmt::format("layers {}\ndims", model.layer_count());
  for (int d : model.dims())
    out += fmt::format(" {}", d);
  out += '\n';
  for (int l = 1; l <= model.layer_count(); ++l) {
    const Layer &layer = model.layer(l);
    out += fmt::format("weights {}\n", l);
    for (int i = 0; i < layer.neurons(); ++i) {
      auto row = layer.row(i);
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (j)
          out += ' ';
        out += row[j] > 0 ? "1" : "-1";
      }
      out += '\n';
    }
  }
  return out;
}

BnnModel load_model(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(fmt::format("cannot open model file '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

void save_model(const BnnModel &model, const std::string &path) {
  std::ofstream out(path);
  if (!out)
    throw Error(fmt::format("cannot write model file '{}'", path));
  out << serialize_model(model);
}

BnnModel random_model(std::span<const int> dims, std::mt19937_64 &rng) {
  if (dims.size() < 2)
    throw ShapeError("random_model needs at least two dims");
  std::bernoulli_distribution coin(0.5);
  std::vector<Layer> layers;
  for (std::size_t l = 1; l < dims.size(); ++l) {
    std::vector<Bipolar> w(static_cast<std::size_t>(dims[l]) * (dims[l - 1] + 1));
    for (auto &v : w)
      v = coin(rng) ? 1 : -1;
    layers.emplace_back(dims[l - 1], dims[l], std::move(w));
  }
  return BnnModel(std::move(layers));
}

std::vector<Bipolar> bits_to_bipolar(std::span<const Bit> bits) {
  std::vector<Bipolar> out;
  out.reserve(bits.size());
  for (Bit b : bits)
    out.push_back(to_bipolar(b));
  return out;
}

std::vector<Bit> bipolar_to_bits(std::span<const Bipolar> values) {
  std::vector<Bit> out;
  out.reserve(values.size());
  for (Bipolar v : values)
    out.push_back(to_bit(v));
  return out;
}

} // namespace bnnv
