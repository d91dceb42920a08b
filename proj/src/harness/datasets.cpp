#include "descentlab/harness/datasets.hpp"

#include "descentlab/harness/idx.hpp"
#include "descentlab/sparse_regression.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

namespace descentlab::harness {
namespace {

constexpr const char* kMnistFiles[] = {"train-images-idx3-ubyte", "train-labels-idx1-ubyte",
                                       "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"};
constexpr int kMnistClasses = 10;

struct MnistPart {
  IdxTensor images;
  IdxTensor labels;
};

MnistPart read_part(const std::filesystem::path& dir, const char* images, const char* labels) {
  MnistPart part{load_idx(dir / images), load_idx(dir / labels)};
  if (part.images.dims.size() != 3 || part.labels.dims.size() != 1 ||
      part.images.dims[0] != part.labels.dims[0]) {
    throw FormatError("mnist: image/label tensors have inconsistent shapes");
  }
  return part;
}

void append_rows(const MnistPart& part, const std::vector<Index>& picks, LabeledDataset& out,
                 Index& row) {
  const std::size_t pixels = std::size_t{part.images.dims[1]} * part.images.dims[2];
  for (Index src : picks) {
    const auto s = static_cast<std::size_t>(src);
    for (std::size_t j = 0; j < pixels; ++j) {
      out.features(row, static_cast<Index>(j)) = part.images.data[s * pixels + j] / 255.0;
    }
    const int label = part.labels.data[s];
    out.targets(row, label) = 1.0;
    out.classes->push_back(label);
    ++row;
  }
}

}  // namespace

void LabeledDataset::validate() const {
  std::vector<char> seen(static_cast<std::size_t>(features.rows()), 0);
  for (const auto* part : {&train, &test}) {
    for (Index i : *part) {
      if (i < 0 || i >= features.rows() || seen[static_cast<std::size_t>(i)]) {
        throw InvalidInput("dataset: splits overlap or index out of range");
      }
      seen[static_cast<std::size_t>(i)] = 1;
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw InvalidInput("dataset: splits do not cover every row");
  }
  if (targets.rows() != features.rows()) {
    throw InvalidInput("dataset: target rows do not match feature rows");
  }
}

rff::SplitDataset LabeledDataset::split() const {
  validate();
  auto take = [this](const std::vector<Index>& idx, const Matrix& m) {
    Matrix out(static_cast<Index>(idx.size()), m.cols());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      out.row(static_cast<Index>(k)) = m.row(idx[k]);
    }
    return out;
  };
  rff::SplitDataset out;
  out.x_train = take(train, features);
  out.y_train = take(train, targets);
  out.x_test = take(test, features);
  out.y_test = take(test, targets);
  if (classes) {
    out.train_classes.emplace();
    out.test_classes.emplace();
    for (Index i : train) {
      out.train_classes->push_back((*classes)[static_cast<std::size_t>(i)]);
    }
    for (Index i : test) {
      out.test_classes->push_back((*classes)[static_cast<std::size_t>(i)]);
    }
  }
  return out;
}

Vector RkhsTarget::operator()(const Matrix& x) const {
  return rff::gaussian_kernel_matrix(x, centers, length_scale) * alphas;
}

LabeledDataset make_synthetic_regression(SyntheticKind kind, const SyntheticParams& params,
                                         std::uint64_t seed) {
  const std::size_t total = params.n_train + params.n_test;
  if (total < 1 || params.dim < 1) {
    throw InvalidInput("synthetic: need at least one sample and one dimension");
  }
  LabeledDataset out;
  out.train.resize(params.n_train);
  std::iota(out.train.begin(), out.train.end(), Index{0});
  out.test.resize(params.n_test);
  std::iota(out.test.begin(), out.test.end(), static_cast<Index>(params.n_train));

  if (kind == SyntheticKind::gaussian_linear) {
    sparse::GaussianLinearProblem problem;
    problem.w_true = Vector::Constant(static_cast<Index>(params.dim),
                                      std::sqrt(params.w_norm_sq / static_cast<double>(params.dim)));
    problem.noise_scale = params.noise;
    problem.n = total;
    sparse::Dataset data = sparse::sample_dataset(problem, derive_seed(seed, "gaussian-linear", 0));
    out.features = std::move(data.x);
    out.targets = std::move(data.y);
    out.feature_scaling = "none (standard normal covariates)";
    return out;
  }

  if (params.centers < 1) {
    throw InvalidInput("synthetic: rkhs target needs at least one center");
  }
  Rng rng = make_rng(seed, "rkhs-target", 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  RkhsTarget target;
  target.length_scale = params.length_scale;
  target.centers.resize(static_cast<Index>(params.centers), static_cast<Index>(params.dim));
  target.alphas.resize(static_cast<Index>(params.centers));
  for (Index k = 0; k < target.centers.rows(); ++k) {
    for (Index j = 0; j < target.centers.cols(); ++j) {
      target.centers(k, j) = unit(rng);
    }
    target.alphas(k) = unit(rng) < 0.5 ? -1.0 : 1.0;
  }
  out.features.resize(static_cast<Index>(total), static_cast<Index>(params.dim));
  for (Index i = 0; i < out.features.rows(); ++i) {
    for (Index j = 0; j < out.features.cols(); ++j) {
      out.features(i, j) = unit(rng);
    }
  }
  Vector y = target(out.features);
  if (params.noise > 0.0) {
    for (Index i = 0; i < y.size(); ++i) {
      y(i) += params.noise * normal(rng);
    }
  }
  out.targets = std::move(y);
  out.feature_scaling = "none (inputs uniform on [0,1]^d)";
  return out;
}

std::vector<Index> stratified_subsample(const std::vector<int>& labels, std::size_t total,
                                        int num_classes, Rng& rng) {
  std::vector<std::vector<Index>> by_class(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw InvalidInput("stratified_subsample: label out of range");
    }
    by_class[static_cast<std::size_t>(labels[i])].push_back(static_cast<Index>(i));
  }
  std::vector<Index> out;
  const std::size_t base = total / static_cast<std::size_t>(num_classes);
  const std::size_t extra = total % static_cast<std::size_t>(num_classes);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    const std::size_t want = base + (c < extra ? 1 : 0);
    auto& pool = by_class[c];
    if (pool.size() < want) {
      throw InvalidInput("stratified_subsample: class " + std::to_string(c) + " has only " +
                         std::to_string(pool.size()) + " examples");
    }
    for (std::size_t i = 0; i < want; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    out.insert(out.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(want));
  }
  std::sort(out.begin(), out.end());
  return out;
}

LabeledDataset load_mnist_subset(const std::filesystem::path& dir, std::size_t n_train,
                                 std::size_t n_test, std::uint64_t seed) {
  const MnistPart train = read_part(dir, kMnistFiles[0], kMnistFiles[1]);
  const MnistPart test = read_part(dir, kMnistFiles[2], kMnistFiles[3]);
  const std::size_t pixels = std::size_t{train.images.dims[1]} * train.images.dims[2];

  auto labels_of = [](const MnistPart& p) {
    return std::vector<int>(p.labels.data.begin(), p.labels.data.end());
  };
  Rng rng = make_rng(seed, "mnist-subsample", 0);
  const std::vector<Index> train_picks = stratified_subsample(labels_of(train), n_train, kMnistClasses, rng);
  const std::vector<Index> test_picks = stratified_subsample(labels_of(test), n_test, kMnistClasses, rng);

  LabeledDataset out;
  out.features.resize(static_cast<Index>(n_train + n_test), static_cast<Index>(pixels));
  out.targets = Matrix::Zero(out.features.rows(), kMnistClasses);
  out.classes.emplace();
  Index row = 0;
  append_rows(train, train_picks, out, row);
  append_rows(test, test_picks, out, row);
  out.train.resize(n_train);
  std::iota(out.train.begin(), out.train.end(), Index{0});
  out.test.resize(n_test);
  std::iota(out.test.begin(), out.test.end(), static_cast<Index>(n_train));
  out.feature_scaling = "pixels / 255";
  return out;
}

std::optional<std::filesystem::path> find_mnist_dir() {
  const char* env = std::getenv(kDataDirEnv);
  if (env == nullptr || *env == '\0') {
    return std::nullopt;
  }
  const std::filesystem::path dir(env);
  for (const char* name : kMnistFiles) {
    if (!std::filesystem::exists(dir / name)) {
      return std::nullopt;
    }
  }
  return dir;
}

}  // namespace descentlab::harness
