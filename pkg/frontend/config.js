// Runtime configuration: point the console at a gateway without rebuilding.
window.LEDGERAIR_CONSOLE = {
  baseUrl: "http://127.0.0.1:8000",
  pollMs: 2000,
};
