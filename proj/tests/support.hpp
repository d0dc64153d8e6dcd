#pragma once

#include <cmath>
#include <cstdio>

inline int cf_checks = 0;
inline int cf_failures = 0;

// variadic so brace-initializer commas inside the condition are harmless
#define CHECK(...)                                                                               \
    do                                                                                           \
    {                                                                                            \
        ++cf_checks;                                                                             \
        if (!(__VA_ARGS__))                                                                      \
        {                                                                                        \
            ++cf_failures;                                                                       \
            std::printf("[FAIL] %s:%d: %s\n", __FILE__, __LINE__, #__VA_ARGS__);                 \
        }                                                                                        \
    } while (0)

#define CHECK_NEAR(a, b, tol)                                                                    \
    do                                                                                           \
    {                                                                                            \
        ++cf_checks;                                                                             \
        const double cf_a = (a);                                                                 \
        const double cf_b = (b);                                                                 \
        if (!(std::fabs(cf_a - cf_b) <= (tol)))                                                  \
        {                                                                                        \
            ++cf_failures;                                                                       \
            std::printf("[FAIL] %s:%d: %s == %.12g, expected %.12g +/- %g\n", __FILE__,          \
                        __LINE__, #a, cf_a, cf_b, double(tol));                                  \
        }                                                                                        \
    } while (0)

#define CHECK_THROWS(Ex, ...)                                                                    \
    do                                                                                           \
    {                                                                                            \
        ++cf_checks;                                                                             \
        bool cf_thrown = false;                                                                  \
        try                                                                                      \
        {                                                                                        \
            (void)(__VA_ARGS__);                                                                 \
        }                                                                                        \
        catch (const Ex&)                                                                        \
        {                                                                                        \
            cf_thrown = true;                                                                    \
        }                                                                                        \
        catch (...)                                                                              \
        {                                                                                        \
        }                                                                                        \
        if (!cf_thrown)                                                                          \
        {                                                                                        \
            ++cf_failures;                                                                       \
            std::printf("[FAIL] %s:%d: %s did not throw %s\n", __FILE__, __LINE__,               \
                        #__VA_ARGS__, #Ex);                                                      \
        }                                                                                        \
    } while (0)

inline int test_summary(const char* suite)
{
    std::printf("%s: %d checks, %d failures\n", suite, cf_checks, cf_failures);
    return cf_failures == 0 ? 0 : 1;
}
