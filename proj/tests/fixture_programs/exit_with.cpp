// Exits with the code given as argv[1] after one line on each stream.
#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
  int code = argc > 1 ? std::atoi(argv[1]) : 0;
  std::printf("exiting with %d\n", code);
  std::fflush(stdout);
  if (code != 0) std::fprintf(stderr, "failure %d\n", code);
  return code;
}
