// Regenerates the bundled CSVs under data/. The committed files are the
// output of this tool with its default arguments; keep them in sync.

#include <filesystem>
#include <iostream>

#include "macfe/datagen.hpp"

int main(int argc, char** argv) {
    namespace fs = std::filesystem;
    using namespace macfe::datagen;

    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("data");
    fs::create_directories(root / "corpus");

    // training corpus: structure plants for binary/unary records plus the
    // three scaler regimes
    write_csv(product_sign("corpus_product", 220, 1, 101), root / "corpus" / "corpus_product.csv");
    write_csv(folded_bands("corpus_bands", 200, 202), root / "corpus" / "corpus_bands.csv");
    write_csv(log_ratio("corpus_ratio", 200, 1, 303), root / "corpus" / "corpus_ratio.csv");
    write_csv(outlier_heavy("corpus_outliers", 150, 4, 0.2, 404),
              root / "corpus" / "corpus_outliers.csv");
    write_csv(gaussian_linear("corpus_normal", 150, 4, 505),
              root / "corpus" / "corpus_normal.csv");
    write_csv(uniform_product("corpus_uniform", 150, 4, 0.25, 606),
              root / "corpus" / "corpus_uniform.csv");

    // bundled evaluation datasets (disjoint seeds from the corpus)
    write_csv(product_sign("synth_product", 240, 2, 9001), root / "synth_product.csv");
    write_csv(log_ratio("synth_logratio", 220, 1, 9002), root / "synth_logratio.csv");

    std::cout << "wrote bundled CSVs under " << root << "\n";
    return 0;
}
