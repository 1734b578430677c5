// placeholder, replaced as the module lands
namespace bklab { namespace { int unused_report = 0; } }
