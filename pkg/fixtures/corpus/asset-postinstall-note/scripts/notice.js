console.log('thanks for installing asset-postinstall-note');
