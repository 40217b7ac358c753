const UNITS = ['B', 'KB', 'MB', 'GB', 'TB'];

module.exports = function format(bytes) {
  let i = 0;
  while (bytes >= 1024 && i < UNITS.length - 1) {
    bytes /= 1024;
    i += 1;
  }
  return bytes.toFixed(1) + ' ' + UNITS[i];
};
