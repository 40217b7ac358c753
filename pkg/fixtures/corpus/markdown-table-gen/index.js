function table(rows) {
  if (!rows.length) return '';
  const header = Object.keys(rows[0]);
  const lines = [
    '| ' + header.join(' | ') + ' |',
    '|' + header.map(() => '---').join('|') + '|',
  ];
  for (const row of rows) {
    lines.push('| ' + header.map((h) => row[h]).join(' | ') + ' |');
  }
  return lines.join('\n');
}

module.exports = table;
