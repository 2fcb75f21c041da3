def execute_command(image):
    image_patch = ImagePatch(image)
    target_patches = image_patch.find('stairs')
    if len(target_patches) == 0:
        return {'function': 'None', 'error': 'No stairs found.'}
    target = target_patches[0]
    inputs = (target.horizontal_center, target.vertical_center)
    return {'function': 'navigate_to_object', 'inputs': inputs, 'box': [target.left, target.lower, target.right, target.upper]}
